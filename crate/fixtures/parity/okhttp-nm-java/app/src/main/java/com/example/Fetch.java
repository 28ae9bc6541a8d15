package com.example;

import okhttp3.Call;
import okhttp3.Callback;
import android.net.ConnectivityManager;
import android.net.NetworkInfo;

class Fetch {
    boolean online(ConnectivityManager cm) {
        NetworkInfo info = cm.getActiveNetworkInfo();
        return info != null && info.isConnected();
    }

    void run(Call call, Callback cb) {
        call.enqueue(cb);
    }
}
