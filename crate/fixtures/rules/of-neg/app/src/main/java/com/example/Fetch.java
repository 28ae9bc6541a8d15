package com.example;

import com.android.volley.RequestQueue;
import com.android.volley.Response;
import com.android.volley.VolleyError;
import com.android.volley.toolbox.StringRequest;
import com.android.volley.toolbox.Volley;

class Fetch {
    void run() {
        RequestQueue queue = Volley.newRequestQueue(this);
        StringRequest req = new StringRequest(0, "https://example.org",
            new Response.Listener() {
                public void onResponse(String payload) {
                    if (payload != null) {
                        handle(payload);
                    }
                }
            },
            new Response.ErrorListener() {
                public void onErrorResponse(VolleyError error) {
                    log(error);
                }
            });
        queue.add(req);
    }

    void handle(String s) {}

    void log(VolleyError e) {}
}
