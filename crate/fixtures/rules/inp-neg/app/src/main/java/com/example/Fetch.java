package com.example;

import java.net.URL;

class Fetch {
    void run() throws Exception {
        URL url = new URL("https://example.org/data");
        url.openConnection();
    }
}
