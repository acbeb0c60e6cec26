class Noop {
    int counter;

    int bump() {
        counter = counter + 1;
        return counter;
    }
}
