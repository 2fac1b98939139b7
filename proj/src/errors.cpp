#include "viscoflow/errors.hpp"

namespace viscoflow {

NoConvergence::NoConvergence(int iterations, double residual, long step)
    : Error("step solver did not converge after " + std::to_string(iterations) + " iterations (residual " +
            std::to_string(residual) + ")" + (step >= 0 ? " at step " + std::to_string(step) : "")),
      iterations_(iterations),
      residual_(residual),
      step_(step) {}

}  // namespace viscoflow
