#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "omr/pipeline.hpp"

namespace omr {

namespace {

std::atomic<unsigned long> g_scratch_counter{0};

std::filesystem::path unique_path(const std::filesystem::path& dir, std::string_view stem, std::string_view ext) {
  return dir / (std::string(stem) + "-" + std::to_string(::getpid()) + "-" + std::to_string(g_scratch_counter++) +
                std::string(ext));
}

std::string shell_quote(std::string_view s) {
  std::string out = "'";
  for (const char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += '\'';
  return out;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

FixtureSource::FixtureSource(std::filesystem::path directory) : directory_(std::move(directory)) {
  if (!std::filesystem::is_directory(directory_)) {
    throw ConfigError("detections directory not found: " + directory_.string());
  }
}

std::filesystem::path FixtureSource::page_file(const std::filesystem::path& directory) {
  return directory / "page.measure.det";
}

std::filesystem::path FixtureSource::unit_file(const std::filesystem::path& directory, std::size_t unit_index,
                                               Category category) {
  return directory / (std::to_string(unit_index) + "." + std::string(category_name(category)) + ".det");
}

std::vector<Detection> FixtureSource::page(const RasterImage&) {
  const auto path = page_file(directory_);
  if (!std::filesystem::exists(path)) throw ConfigError("missing page detections: " + path.string());
  return load_detections_file(path);
}

std::vector<Detection> FixtureSource::unit(std::size_t unit_index, const RasterImage&, Category category) {
  const auto path = unit_file(directory_, unit_index, category);
  if (!std::filesystem::exists(path)) return {};
  return load_detections_file(path);
}

std::vector<Detection> external_detector(const std::string& command_template, const std::filesystem::path& image,
                                         Category category) {
  if (command_template.find("{image}") == std::string::npos) {
    throw ConfigError("detector command needs an {image} placeholder");
  }
  std::string command = command_template;
  replace_all(command, "{image}", shell_quote(image.string()));
  replace_all(command, "{category}", category_name(category));

  const auto err_path = unique_path(std::filesystem::temp_directory_path(), "omr-detector", ".err");
  // The newline keeps a trailing shell comment in the template from
  // swallowing the closing parenthesis.
  const std::string full = "( " + command + "\n) 2> " + shell_quote(err_path.string());
  FILE* pipe = ::popen(full.c_str(), "r");
  if (pipe == nullptr) throw DetectorError("cannot start detector: " + command);
  std::string output;
  char buffer[4096];
  for (std::size_t n; (n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0;) output.append(buffer, n);
  const int status = ::pclose(pipe);
  std::string err = read_text(err_path);
  std::error_code ec;
  std::filesystem::remove(err_path, ec);
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const int code = status != -1 && WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    while (!err.empty() && (err.back() == '\n' || err.back() == '\r')) err.pop_back();
    throw DetectorError("detector exited with status " + std::to_string(code) + " for " +
                        std::string(category_name(category)) + (err.empty() ? "" : ": " + err));
  }
  auto detections = load_detections(output);
  std::erase_if(detections, [category](const Detection& d) { return d.category != category; });
  return detections;
}

CommandSource::CommandSource(std::string command_template) : template_(std::move(command_template)) {
  if (template_.find("{image}") == std::string::npos) {
    throw ConfigError("detector command needs an {image} placeholder");
  }
  scratch_ = unique_path(std::filesystem::temp_directory_path(), "omr-units", "");
  std::filesystem::create_directories(scratch_);
}

CommandSource::~CommandSource() {
  std::error_code ec;
  std::filesystem::remove_all(scratch_, ec);
}

std::vector<Detection> CommandSource::page(const RasterImage& page) {
  const auto path = scratch_ / "page.png";
  write_png(page, path);
  return external_detector(template_, path, Category::measure);
}

std::vector<Detection> CommandSource::unit(std::size_t unit_index, const RasterImage& image, Category category) {
  const auto path = scratch_ / ("unit-" + std::to_string(unit_index) + "-" + std::string(category_name(category)) +
                                ".png");
  write_png(image, path);
  return external_detector(template_, path, category);
}

DelayedSource::DelayedSource(DetectionSource& inner, std::chrono::milliseconds per_unit)
    : inner_(inner),
      per_call_(std::chrono::duration_cast<std::chrono::microseconds>(per_unit) /
                static_cast<long>(kSymbolCategories.size())) {}

std::vector<Detection> DelayedSource::page(const RasterImage& page) { return inner_.page(page); }

std::vector<Detection> DelayedSource::unit(std::size_t unit_index, const RasterImage& image, Category category) {
  std::this_thread::sleep_for(per_call_);
  return inner_.unit(unit_index, image, category);
}

}  // namespace omr
