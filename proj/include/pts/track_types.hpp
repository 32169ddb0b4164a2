#pragma once

#include <vector>

#include "pts/box.hpp"
#include "pts/geometry.hpp"
#include "pts/image.hpp"

namespace pts {

enum class TrackStatus { Tracked, Failed, Reinitializing };

inline const char* to_string(TrackStatus s) {
    switch (s) {
        case TrackStatus::Tracked: return "tracked";
        case TrackStatus::Failed: return "failed";
        case TrackStatus::Reinitializing: return "reinitializing";
    }
    return "?";
}

/// Per-frame tracker output. predicted_center is the pre-observation prior
/// projected into pending-frame coordinates; predicted_velocity is the prior
/// velocity in reference coordinates. Mask and box are in frame coordinates.
struct TrackOutput {
    int frame_index = 0;
    Point2 predicted_center;
    Vec2 predicted_velocity;
    RotatedBox box;
    BinaryMask mask;
    double score = 0.0;
    TrackStatus status = TrackStatus::Tracked;
};

struct TrackRecord {
    std::vector<TrackOutput> frames;
    int failure_count = 0;
    std::vector<int> reinit_events;
};

} // namespace pts
