class Query {
    private Logger logger;
    private Logger log;

    void lookup(int key) {
        logger.info("lookup {}", key);
        if (key < 0) {
            this.log.error("bad key {}", key);
        }
    }
}
