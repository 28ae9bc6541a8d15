package com.example;

import java.net.HttpURLConnection;
import java.net.URL;
import android.net.ConnectivityManager;
import android.net.NetworkCapabilities;
import android.net.NetworkInfo;

class Fetch {
    boolean ready(ConnectivityManager cm, NetworkCapabilities caps, NetworkInfo info) {
        if (!caps.hasCapability(NetworkCapabilities.NET_CAPABILITY_INTERNET)) {
            return false;
        }
        return info.isConnected() && info.getType() == 1;
    }

    String fetch() throws Exception {
        URL url = new URL("https://example.org/data");
        HttpURLConnection conn = (HttpURLConnection) url.openConnection();
        return conn.getResponseMessage();
    }
}
