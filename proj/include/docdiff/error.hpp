#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace docdiff {

/// Base class for all recoverable engine errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct FileNotFoundError : Error {
    explicit FileNotFoundError(const std::string& path) : Error("file not found: " + path) {}
};

struct UnsupportedFormatError : Error {
    explicit UnsupportedFormatError(const std::string& msg) : Error("unsupported format: " + msg) {}
};

struct CorruptImageError : Error {
    explicit CorruptImageError(const std::string& msg) : Error("corrupt image: " + msg) {}
};

struct BlankImageError : Error {
    BlankImageError() : Error("image has no foreground pixels") {}
    explicit BlankImageError(const std::string& msg) : Error(msg) {}
};

struct BoxOutOfBoundsError : Error {
    explicit BoxOutOfBoundsError(const std::string& msg) : Error("box out of bounds: " + msg) {}
};

struct MalformedHocrError : Error {
    explicit MalformedHocrError(const std::string& msg) : Error("malformed hOCR: " + msg) {}
};

struct MissingBboxError : Error {
    explicit MissingBboxError(const std::string& msg) : Error("word without usable bbox: " + msg) {}
};

struct EngineNotFoundError : Error {
    explicit EngineNotFoundError(const std::string& exe) : Error("OCR engine not found: " + exe) {}
};

struct EngineFailedError : Error {
    explicit EngineFailedError(const std::string& msg) : Error("OCR engine failed: " + msg) {}
};

struct TimeoutError : Error {
    explicit TimeoutError(const std::string& msg) : Error("timed out: " + msg) {}
};

struct BothBlankError : Error {
    BothBlankError() : Error("both word images are blank") {}
};

/// Wraps any pipeline failure with the stage it happened in.
struct StageError : Error {
    std::string stage;
    StageError(std::string stage_name, const std::string& msg)
        : Error("stage '" + stage_name + "': " + msg), stage(std::move(stage_name)) {}
};

}  // namespace docdiff
