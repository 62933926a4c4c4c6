#include "mecanchor/synthetic.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "mecanchor/csv.hpp"

namespace mecanchor::synthetic {

std::vector<Site> grid_sites(int rows, int cols, double spacing) {
    std::vector<Site> sites;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            sites.push_back({r * cols + c, c * spacing, r * spacing});
        }
    }
    return sites;
}

std::vector<Site> random_sites(std::size_t count, double extent, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coordinate(0.0, extent);
    std::vector<Site> sites;
    for (std::size_t i = 0; i < count; ++i) {
        double x = coordinate(rng);
        double y = coordinate(rng);
        sites.push_back({static_cast<NodeId>(i), x, y});
    }
    return sites;
}

namespace {

void reflect(double& value, double& velocity, double low, double high) {
    for (int guard = 0; guard < 8 && (value < low || value > high); ++guard) {
        if (value < low) {
            value = 2 * low - value;
            velocity = -velocity;
        } else if (value > high) {
            value = 2 * high - value;
            velocity = -velocity;
        }
    }
}

}  // namespace

std::vector<SlotPositions> linear_motion(const MotionOptions& options) {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> x0(options.min_x, options.max_x);
    std::uniform_real_distribution<double> y0(options.min_y, options.max_y);
    std::uniform_real_distribution<double> heading(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> speed(options.min_speed, options.max_speed);

    struct Mover {
        std::string id;
        Position p;
        double vx;
        double vy;
    };
    std::vector<Mover> movers;
    for (std::size_t i = 0; i < options.vehicles; ++i) {
        double angle = heading(rng);
        double s = speed(rng);
        Position start{x0(rng), y0(rng)};
        movers.push_back({"veh" + std::to_string(i), start, s * std::cos(angle), s * std::sin(angle)});
    }

    std::vector<SlotPositions> slots;
    for (std::size_t k = 0; k < options.slots; ++k) {
        SlotPositions slot;
        slot.slot_index = static_cast<std::int64_t>(k);
        for (auto& mover : movers) {
            slot.positions[mover.id] = mover.p;
            mover.p.x += mover.vx * options.slot_duration;
            mover.p.y += mover.vy * options.slot_duration;
            reflect(mover.p.x, mover.vx, options.min_x, options.max_x);
            reflect(mover.p.y, mover.vy, options.min_y, options.max_y);
        }
        slots.push_back(std::move(slot));
    }
    return slots;
}

void write_trace(std::ostream& out, const std::vector<SlotPositions>& slots, double slot_duration) {
    for (const auto& slot : slots) {
        const double t = (static_cast<double>(slot.slot_index) + 0.5) * slot_duration;
        for (const auto& [vehicle, p] : slot.positions) {
            out << csv::format_number(t) << ' ' << vehicle << ' ' << csv::format_number(p.x) << ' '
                << csv::format_number(p.y) << " 0\n";
        }
    }
}

void write_sites(std::ostream& out, const std::vector<Site>& sites) {
    out << "# id x y\n";
    for (const auto& site : sites) {
        out << site.id << ' ' << csv::format_number(site.x) << ' ' << csv::format_number(site.y) << '\n';
    }
}

SlotSource replay(const std::vector<SlotPositions>& slots) {
    auto cursor = std::make_shared<std::size_t>(0);
    return [&slots, cursor]() -> std::optional<SlotPositions> {
        if (*cursor >= slots.size()) {
            return std::nullopt;
        }
        return slots[(*cursor)++];
    };
}

}  // namespace mecanchor::synthetic
