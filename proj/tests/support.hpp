#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "vcdim/dataset.hpp"

namespace testing_support {

inline vcdim::Dataset make_dataset(const std::vector<std::string>& names,
                                   const std::vector<std::vector<double>>& cols, const std::vector<double>& y) {
  vcdim::Dataset d;
  d.covariate_names = names;
  d.response_name = "y";
  d.response = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  d.covariates.resize(static_cast<Eigen::Index>(y.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    d.covariates.col(static_cast<Eigen::Index>(c)) =
        Eigen::Map<const Eigen::VectorXd>(cols[c].data(), static_cast<Eigen::Index>(cols[c].size()));
  }
  return d;
}

/// Exactly linear response on synthetic covariates (no noise term).
inline vcdim::Dataset noiseless(std::size_t p, std::size_t n, std::uint64_t seed) {
  vcdim::SyntheticConfig cfg;
  cfg.p = p;
  cfg.n = n;
  cfg.seed = seed;
  vcdim::Dataset d = vcdim::generate_synthetic(cfg);
  Eigen::VectorXd beta = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(p), 1.0, 2.0);
  d.response = (d.covariates * beta).array() + 3.0;
  return d;
}

/// Per-test scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = std::filesystem::temp_directory_path() /
            ("vcdim_" + std::string(info->test_suite_name()) + "_" + info->name());
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }
  [[nodiscard]] std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(path_ / name, std::ios::binary) << content;
    return file(name);
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testing_support
