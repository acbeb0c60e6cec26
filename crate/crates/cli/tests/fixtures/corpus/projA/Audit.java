class Audit {
    private static Logger LOG;
    int failures;

    void record(int count) {
        if (count > 0) {
            LOG.warn("{} failures", count);
            failures = failures + count;
        }
        LOG.info("audit done");
    }
}
