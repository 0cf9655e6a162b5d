#include "frontdoor/error.hpp"

namespace frontdoor {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::CycleDetected: return "CycleDetected";
        case Errc::UnknownNode: return "UnknownNode";
        case Errc::DuplicateNode: return "DuplicateNode";
        case Errc::DuplicateEdge: return "DuplicateEdge";
        case Errc::SelfLoop: return "SelfLoop";
        case Errc::EmptyName: return "EmptyName";
        case Errc::OverlappingSets: return "OverlappingSets";
        case Errc::NodeNotObserved: return "NodeNotObserved";
        case Errc::GraphParse: return "GraphParse";
        case Errc::InvalidCount: return "InvalidCount";
        case Errc::InvalidConfig: return "InvalidConfig";
        case Errc::DataParse: return "DataParse";
        case Errc::UnknownColumn: return "UnknownColumn";
        case Errc::MissingValue: return "MissingValue";
        case Errc::TooFewDistinctValues: return "TooFewDistinctValues";
        case Errc::SingularSystem: return "SingularSystem";
        case Errc::SizeMismatch: return "SizeMismatch";
        case Errc::AllMissingColumn: return "AllMissingColumn";
        case Errc::NothingToImpute: return "NothingToImpute";
        case Errc::EmptyResidualPool: return "EmptyResidualPool";
        case Errc::TooFewCompleteRows: return "TooFewCompleteRows";
        case Errc::InputMissing: return "InputMissing";
        case Errc::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace frontdoor
