package com.example;

import okhttp3.OkHttpClient;

class Extra {
    OkHttpClient fresh() {
        return new OkHttpClient();
    }
}
