package com.example;

import android.net.ConnectivityManager;

class Status {
    boolean online(ConnectivityManager cm) {
        return cm.getActiveNetworkInfo() != null;
    }
}
