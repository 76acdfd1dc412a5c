#pragma once

#include <span>
#include <string>

#include "warpcap/capacity.hpp"
#include "warpcap/cutoffs.hpp"
#include "warpcap/inequalities.hpp"
#include "warpcap/sobolev.hpp"
#include "warpcap/stokes.hpp"

namespace warpcap {

// Every emitter below is deterministic: the same inputs produce byte-identical
// text, numbers use the shortest exact decimal form with '.' regardless of
// locale, CSV starts with a header row, and JSON objects carry "schema": 1.
// Non-finite values render as "inf"/"-inf"/"nan" (JSON: as strings).

struct CapacityRow {
  double p = 2.0;
  double r1 = 1.0;
  double r2 = 2.0;
  CapacityBounds bounds;
};

std::string csv_capacity(std::span<const CapacityRow> rows);

// (r, phi_energy, xi_bound, ratio) from an annulus energy sweep.
std::string csv_energy_sweep(std::span<const EnergySweepRow> rows);

// (R, ball_integral, flux, condition_ratio) along the harness ladder.
std::string csv_stokes(const StokesReport& report);

struct SobolevRow {
  double r = 1.0;
  double volume_ratio = 0.0;  // V(r) / r^m
  double product = 0.0;       // r^{(m-q)/(q-1)} int_r^inf a_q
};

std::string csv_sobolev(std::span<const SobolevRow> rows);

std::string json_condition(const ConditionReport& report);
std::string json_stokes(const StokesReport& report);
std::string json_cp(const CpEstimate& estimate);
std::string json_parabolicity(const ParabolicityVerdict& verdict, double p);
std::string json_counterexample(const CounterexampleReport& report,
                                const CounterexampleSpec& spec);

// Structural overview of a parsed manifold: dimension, base radius, segment
// table, tail classification, and h/A/V sampled at a few radii.
std::string json_manifold_summary(const ModelGeometry& g);

}  // namespace warpcap
