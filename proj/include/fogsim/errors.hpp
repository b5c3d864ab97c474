#pragma once

#include <stdexcept>
#include <string>

namespace fogsim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// decomposition
struct InvalidTemplateError : Error {
    using Error::Error;
};
struct InvalidSplitError : Error {
    using Error::Error;
};
struct InvalidGraphError : Error {
    using Error::Error;
};

// placement
struct RoleError : Error {
    using Error::Error;
};

// cost engine
struct InfeasiblePlacementError : Error {
    using Error::Error;
};
struct MissingLinkError : Error {
    using Error::Error;
};

// optimizer
struct NoFeasiblePlacementError : Error {
    using Error::Error;
};
struct GreedyDeadEndError : NoFeasiblePlacementError {
    using NoFeasiblePlacementError::NoFeasiblePlacementError;
};
struct SearchSpaceTooLargeError : Error {
    using Error::Error;
};

// scenario parsing; path is a JSON pointer into the offending document
struct ScenarioError : Error {
    ScenarioError(const std::string& message, std::string json_path)
        : Error(message), path(std::move(json_path)) {}
    std::string path;
};

struct SyntaxError : ScenarioError {
    SyntaxError(const std::string& message, int line_no, int column_no)
        : ScenarioError(message, ""), line(line_no), column(column_no) {}
    int line = 0;
    int column = 0;
};

struct SchemaError : ScenarioError {
    using ScenarioError::ScenarioError;
};

struct ReferenceError : ScenarioError {
    using ScenarioError::ScenarioError;
};

struct InvariantError : ScenarioError {
    using ScenarioError::ScenarioError;
};

}  // namespace fogsim
