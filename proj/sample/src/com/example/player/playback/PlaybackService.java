/*
 * Copyright 2026 The reviewscope Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


package com.example.player.playback;

/** Foreground service that owns the media session and headset buttons. */
public class PlaybackService {
    private boolean screenOffWakeLock;
    private MediaSession session;

    /** Pauses playback, also called from headset button events. */
    public void pause() {
        session.pause();
    }

    public void onMediaButton(int keyCode) {
        if (keyCode == 85) {
            pause();
        }
    }

    public void acquireWakeLock() {
        screenOffWakeLock = true;
    }
}
