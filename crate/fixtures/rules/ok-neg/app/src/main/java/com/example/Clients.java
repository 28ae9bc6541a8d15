package com.example;

import okhttp3.OkHttpClient;

class Clients {
    OkHttpClient shared() {
        return new OkHttpClient();
    }
}
