package com.example;

import okhttp3.Call;
import okhttp3.Callback;
import android.net.ConnectivityManager;
import android.net.NetworkInfo;

class Fetch {
    void run(Call call, Callback cb, ConnectivityManager cm) {
        NetworkInfo info = cm.getActiveNetworkInfo();
        if (info != null && info.isConnected()) {
            call.enqueue(cb);
        }
    }
}
