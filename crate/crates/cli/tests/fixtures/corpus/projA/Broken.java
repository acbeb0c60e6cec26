class Broken {
    void m( {
}
