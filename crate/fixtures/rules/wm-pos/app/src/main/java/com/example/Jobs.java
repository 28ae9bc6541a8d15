package com.example;

import com.firebase.jobdispatcher.FirebaseJobDispatcher;

class Jobs {
    void schedule(FirebaseJobDispatcher dispatcher) {
        dispatcher.mustSchedule(job());
    }

    Object job() {
        return null;
    }
}
