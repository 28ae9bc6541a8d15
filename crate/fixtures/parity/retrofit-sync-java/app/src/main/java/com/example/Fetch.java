package com.example;

import retrofit2.Call;
import retrofit2.Response;

class Fetch {
    void run(Call<String> call) throws Exception {
        try {
            ship(call.execute());
        } catch (Exception e) {
            report(e);
        }
    }

    void ship(Object response) {}

    void report(Exception e) {}
}
