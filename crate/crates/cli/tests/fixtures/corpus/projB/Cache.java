class Cache {
    private static Logger LOG;

    void evict(int entries) {
        LOG.trace("evict pass");
        if (LOG.isDebugEnabled()) {
            LOG.debug("evicting {} entries", entries);
        }
    }
}
