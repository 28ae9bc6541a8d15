package com.example;

import okhttp3.Call;
import okhttp3.Callback;
import okhttp3.Response;

class Fetch {
    void run(Call call) {
        call.enqueue(new Callback() {
            @Override
            public void onResponse(Call call, Response response) {
                handle(response.body());
            }

            @Override
            public void onFailure(Call call, Throwable t) {
                log(t);
            }
        });
    }

    void handle(Object body) {}

    void log(Throwable t) {}
}
