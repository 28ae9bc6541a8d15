package com.example;

import okhttp3.Call;
import okhttp3.Callback;

class Fetch {
    void run(Call call, Callback cb) {
        call.enqueue(cb);
    }
}
