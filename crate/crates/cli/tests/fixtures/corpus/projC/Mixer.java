class Mixer {
    private static Logger LOG;

    void blend(int tracks) {
        LOG.trace("blend {} tracks", tracks);
        if (tracks < 0) {
            LOG.fatal("negative track count");
            System.exit(2);
        }
    }
}
