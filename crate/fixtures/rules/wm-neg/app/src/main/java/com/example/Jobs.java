package com.example;

import androidx.work.WorkManager;

class Jobs {
    void schedule(WorkManager manager) {
        manager.enqueue(request());
    }

    Object request() {
        return null;
    }
}
