class Deploy {
    private static Logger LOG;

    void push(int nodes) {
        if (nodes == 0) {
            console.error("no nodes");
            LOG.error("deploy to zero nodes");
        }
        warn("not a log call");
    }
}
