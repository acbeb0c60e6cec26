class Fetch {
    private static Logger LOG;
    int retries;

    int pull(int id) {
        retries = retries + 1;
        if (retries > 3) {
            LOG.error("giving up on {}", id);
            return 0;
        }
        LOG.warn("retry {} for {}", retries, id);
        return retries;
    }
}
