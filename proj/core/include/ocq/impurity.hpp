#pragma once

namespace ocq {

/// Impurity-gas coupling in trap units. width == 0 is the contact
/// interaction strength * delta(x - position); width > 0 replaces the delta
/// by a unit-area Gaussian of that standard deviation.
struct ImpurityPotential {
    double strength = 0.0;
    double position = 0.0;
    double width = 0.0;

    [[nodiscard]] bool is_point() const noexcept { return width == 0.0; }
    [[nodiscard]] bool is_centered() const noexcept { return position == 0.0; }

    /// Throws UsageError on non-finite fields or negative width.
    void validate() const;

    friend bool operator==(const ImpurityPotential&, const ImpurityPotential&) = default;
};

}  // namespace ocq
