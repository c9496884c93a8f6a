#pragma once

#include <optional>
#include <string>
#include <vector>

#include "speedlearn/config.hpp"
#include "speedlearn/deadreckon.hpp"

// Whole-run steps shared by the command-line tool and the end-to-end checks.
namespace speedlearn::run {

// Training drives drive_00, drive_01, ... per config.sim.
std::vector<Drive> simulate_training_drives(const cfg::RunConfig& config);
// The held-out drive, or nothing when sim.heldout_duration is 0.
std::optional<Drive> simulate_heldout(const cfg::RunConfig& config);

// One lane per drive, split by pipe.split_ratio.
pipe::DatasetSplit prepare_dataset(std::span<const Drive> drives, const cfg::RunConfig& config);

// Dead reckoning from the drive's true initial pose. Aided mode needs a model.
nav::NavSolution navigate(const Drive& drive, cfg::NavMode mode, const net::SpeedModel* model,
                          const cfg::RunConfig& config);

std::string mode_name(cfg::NavMode mode);

}  // namespace speedlearn::run
