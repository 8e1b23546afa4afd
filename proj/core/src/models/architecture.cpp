#include "smpred/models/architecture.hpp"

#include <stdexcept>

namespace smpred::models {

ArchitectureSpec canonical_spec(ArchKind kind) {
    ArchitectureSpec spec;
    spec.kind = kind;
    switch (kind) {
        case ArchKind::S:
            spec.sensor_hidden = {16, 32, 64};
            break;
        case ArchKind::SM:
            spec.sensor_hidden = {16, 32, 64};
            spec.motor_hidden = {16, 32, 64};
            break;
        case ArchKind::RecurrentS:
            spec.sensor_hidden = {16};
            spec.lstm_hidden = {32, 32, 32};
            break;
        case ArchKind::RecurrentSM:
            spec.sensor_hidden = {16};
            spec.lstm_hidden = {32, 32, 32};
            spec.motor_hidden = {16};
            break;
    }
    return spec;
}

std::string to_string(ArchKind kind) {
    switch (kind) {
        case ArchKind::S: return "s";
        case ArchKind::SM: return "sm";
        case ArchKind::RecurrentS: return "recurrent-s";
        case ArchKind::RecurrentSM: return "recurrent-sm";
    }
    throw std::logic_error("unreachable architecture kind");
}

ArchKind arch_from_string(const std::string& name) {
    if (name == "s") return ArchKind::S;
    if (name == "sm") return ArchKind::SM;
    if (name == "recurrent-s") return ArchKind::RecurrentS;
    if (name == "recurrent-sm") return ArchKind::RecurrentSM;
    throw std::invalid_argument("unknown architecture '" + name +
                                "' (expected s, sm, recurrent-s or recurrent-sm)");
}

}  // namespace smpred::models
