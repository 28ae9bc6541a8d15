package com.example;

import okhttp3.Call;
import okhttp3.Callback;
import okhttp3.Response;
import okhttp3.ResponseBody;

class Fetch {
    void run(Call call) {
        call.enqueue(new Callback() {
            @Override
            public void onResponse(Call call, Response response) {
                ResponseBody payload = response.body();
                if (payload != null) {
                    handle(payload);
                }
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
