#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mecanchor/mobility.hpp"
#include "mecanchor/simulator.hpp"
#include "mecanchor/topology.hpp"

namespace mecanchor::synthetic {

/// rows x cols lattice, ids row-major, spacing in meters.
std::vector<Site> grid_sites(int rows, int cols, double spacing);

/// Uniform sites in [0, extent)^2.
std::vector<Site> random_sites(std::size_t count, double extent, std::uint64_t seed);

struct MotionOptions {
    std::size_t vehicles = 200;
    std::size_t slots = 20;
    double slot_duration = 5.0;
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 1600.0;
    double max_y = 1600.0;
    double min_speed = 5.0;   // m/s
    double max_speed = 15.0;
    std::uint64_t seed = 1;
};

/// Vehicles moving in straight lines at constant speed, reflecting off the
/// bounding box. Every vehicle is present in every slot.
std::vector<SlotPositions> linear_motion(const MotionOptions& options);

/// One trace entry per vehicle per slot, at mid-slot.
void write_trace(std::ostream& out, const std::vector<SlotPositions>& slots, double slot_duration);
void write_sites(std::ostream& out, const std::vector<Site>& sites);

/// Replays prepared slots.
SlotSource replay(const std::vector<SlotPositions>& slots);

}  // namespace mecanchor::synthetic
