#pragma once

#include <stdexcept>
#include <string>

namespace uhpsot {

// Base class for every error raised by the library.
class TrackerError : public std::runtime_error {
public:
    explicit TrackerError(const std::string& msg) : std::runtime_error(msg) {}
};

// --- media / sequence loading ---------------------------------------------

class MalformedLine : public TrackerError {
public:
    MalformedLine(int line_no, const std::string& line)
        : TrackerError("malformed ground-truth line " + std::to_string(line_no) + ": '" + line + "'"),
          line_no(line_no) {}
    int line_no;
};

class NonPositiveSize : public TrackerError {
public:
    explicit NonPositiveSize(const std::string& msg) : TrackerError(msg) {}
};

class MissingImages : public TrackerError {
public:
    explicit MissingImages(const std::string& msg) : TrackerError(msg) {}
};

class GroundTruthMismatch : public TrackerError {
public:
    explicit GroundTruthMismatch(const std::string& msg) : TrackerError(msg) {}
};

class DegenerateBox : public TrackerError {
public:
    explicit DegenerateBox(const std::string& msg) : TrackerError(msg) {}
};

// --- features / filter learning -------------------------------------------

class BadGeometry : public TrackerError {
public:
    explicit BadGeometry(const std::string& msg) : TrackerError(msg) {}
};

class DimensionMismatch : public TrackerError {
public:
    explicit DimensionMismatch(const std::string& msg) : TrackerError(msg) {}
};

class NonFiniteInput : public TrackerError {
public:
    explicit NonFiniteInput(const std::string& msg) : TrackerError(msg) {}
};

// --- background motion ------------------------------------------------------

class TooFewKeypoints : public TrackerError {
public:
    explicit TooFewKeypoints(const std::string& msg) : TrackerError(msg) {}
};

class NoMatches : public TrackerError {
public:
    explicit NoMatches(const std::string& msg) : TrackerError(msg) {}
};

class DegenerateConfiguration : public TrackerError {
public:
    explicit DegenerateConfiguration(const std::string& msg) : TrackerError(msg) {}
};

class DegenerateModel : public TrackerError {
public:
    explicit DegenerateModel(const std::string& msg) : TrackerError(msg) {}
};

class NoShape : public TrackerError {
public:
    explicit NoShape(const std::string& msg) : TrackerError(msg) {}
};

// --- trajectory / pipeline / evaluation ------------------------------------

class InsufficientHistory : public TrackerError {
public:
    explicit InsufficientHistory(const std::string& msg) : TrackerError(msg) {}
};

class UnknownVariant : public TrackerError {
public:
    explicit UnknownVariant(const std::string& msg) : TrackerError(msg) {}
};

class LengthMismatch : public TrackerError {
public:
    explicit LengthMismatch(const std::string& msg) : TrackerError(msg) {}
};

class SpecInfeasible : public TrackerError {
public:
    explicit SpecInfeasible(const std::string& msg) : TrackerError(msg) {}
};

class IoError : public TrackerError {
public:
    explicit IoError(const std::string& msg) : TrackerError(msg) {}
};

} // namespace uhpsot
