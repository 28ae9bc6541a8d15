package com.example;

import okhttp3.Call;
import okhttp3.Callback;
import android.net.NetworkInfo;

class Fetch {
    int kind(NetworkInfo info) {
        return info.getType();
    }

    void run(Call call, Callback cb, NetworkInfo info) {
        if (kind(info) == 1) {
            call.enqueue(cb);
        }
    }
}
