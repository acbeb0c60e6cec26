class Boot {
    private static Logger LOG;

    void init(int memory) {
        if (memory < 16) {
            LOG.fatal("only {} mb free", memory);
            System.exit(1);
        }
    }
}
