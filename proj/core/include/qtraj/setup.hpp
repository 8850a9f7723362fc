#pragma once

#include <string>
#include <variant>

namespace qtraj {

struct FreePotential {};

// V = U on x >= 0 (the forbidden interior). The allowed side x < 0 is served by
// FreePotential.
struct StepPotential {
    double U = 1.0;
};

// V = f x with f > 0.
struct LinearPotential {
    double f = 1.0;
};

using PotentialModel = std::variant<FreePotential, StepPotential, LinearPotential>;

/// Mass, energy, hbar and potential. Natural units: everything dimensionless.
/// hbar is an independent variable here; the classical limit is probed by
/// sweeping it toward zero, never by setting it to zero.
struct PhysicalSetup {
    double m = 1.0;
    double E = 0.5;
    double hbar = 1.0;
    PotentialModel potential = FreePotential{};
};

// Throws DomainError unless m > 0, hbar > 0, all finite, and the potential's
// own constraints hold (Free: E > 0; Step: U > E; Linear: f > 0).
void validate(const PhysicalSetup& setup);

double potential_energy(const PhysicalSetup& setup, double x);
std::string potential_name(const PotentialModel& potential);

inline PhysicalSetup with_hbar(PhysicalSetup setup, double hbar) {
    setup.hbar = hbar;
    return setup;
}

inline PhysicalSetup with_energy(PhysicalSetup setup, double energy) {
    setup.E = energy;
    return setup;
}

}  // namespace qtraj
