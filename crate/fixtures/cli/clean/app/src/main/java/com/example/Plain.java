package com.example;

class Plain {
    int total(int a, int b) {
        return a + b;
    }
}
