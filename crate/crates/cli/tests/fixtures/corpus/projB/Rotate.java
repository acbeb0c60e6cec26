class Rotate {
    private static Logger LOG;

    void roll(int segments) {
        int next = segments + 1;
        if (LOG.isDebugEnabled()) {
            LOG.debug("rolling to {}", next);
        }
        apply(next);
    }

    void apply(int target) {
        use(target);
    }
}
