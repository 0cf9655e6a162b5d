#ifndef FRONTDOOR_ERROR_HPP
#define FRONTDOOR_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace frontdoor {

enum class Errc {
    // graph
    CycleDetected,
    UnknownNode,
    DuplicateNode,
    DuplicateEdge,
    SelfLoop,
    EmptyName,
    OverlappingSets,
    NodeNotObserved,
    GraphParse,
    // simulation / data
    InvalidCount,
    InvalidConfig,
    DataParse,
    UnknownColumn,
    MissingValue,
    // smoothing
    TooFewDistinctValues,
    SingularSystem,
    SizeMismatch,
    // imputation
    AllMissingColumn,
    NothingToImpute,
    // estimation
    EmptyResidualPool,
    TooFewCompleteRows,
    // io
    InputMissing,
    Io,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace frontdoor

#endif
