#pragma once

#include <stdexcept>
#include <string>

namespace sdfest
{
// Invalid input or configuration (dimension mismatch, bad flag, m not
// dividing M, ...).
class ConfigError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

// Input that parses but fails a numerical check (non-monotone G, masses that
// do not sum to one, ...).
class NumericError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

class IoError : public std::runtime_error
{
  public:
    IoError(std::string const& path, std::string const& what)
        : std::runtime_error(path + ": " + what), path_(path)
    {
    }

    std::string const& path() const noexcept { return path_; }

  private:
    std::string path_;
};
}  // namespace sdfest
