package com.example;

import java.net.HttpURLConnection;
import java.net.URL;

class Fetch {
    String fetch() throws Exception {
        URL url = new URL("https://example.org/data");
        HttpURLConnection conn = (HttpURLConnection) url.openConnection();
        return conn.getResponseMessage();
    }
}
