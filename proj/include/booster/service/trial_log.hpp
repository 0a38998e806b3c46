#ifndef BOOSTER_SERVICE_TRIAL_LOG_HPP
#define BOOSTER_SERVICE_TRIAL_LOG_HPP

#include <booster/error.hpp>
#include <booster/trial_record.hpp>

#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <system_error>
#include <vector>

namespace booster {

/// Destination for committed trials. append() must either persist the
/// record or throw StorageError.
class TrialSink {
public:
  virtual ~TrialSink() = default;
  virtual void append(const TrialRecord& record) = 0;
  [[nodiscard]] virtual std::vector<TrialRecord> records() const = 0;
};

/// Append-only line-delimited log on disk. Every append is flushed before
/// returning. A torn final line left by a crash is cut off on open so the
/// next record starts on a fresh line.
class FileTrialLog final : public TrialSink {
public:
  explicit FileTrialLog(std::filesystem::path path) : path_(std::move(path)) {
    std::error_code ec;
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
    if (std::filesystem::is_directory(path_)) throw StorageError("trial log path " + path_.string() + " is a directory");
    if (std::filesystem::exists(path_)) drop_torn_tail();
  }

  [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

  void append(const TrialRecord& record) override {
    const std::lock_guard lock(mutex_);
    const std::string line = to_json(record).dump() + "\n";
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw StorageError("cannot open trial log " + path_.string());
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    out.flush();
    if (!out) throw StorageError("write to trial log " + path_.string() + " failed");
  }

  [[nodiscard]] std::vector<TrialRecord> records() const override {
    const std::lock_guard lock(mutex_);
    if (!std::filesystem::exists(path_)) return {};
    std::ifstream in(path_, std::ios::binary);
    if (!in || std::filesystem::is_directory(path_)) throw StorageError("cannot read trial log " + path_.string());
    return read_trial_log(in);
  }

private:
  void drop_torn_tail() {
    std::ifstream in(path_, std::ios::binary);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (text.empty() || text.back() == '\n') return;
    const auto keep = text.rfind('\n');
    in.close();
    std::filesystem::resize_file(path_, keep == std::string::npos ? 0 : keep + 1);
  }

  std::filesystem::path path_;
  mutable std::mutex mutex_;
};

/// In-memory log; used by tests and dry runs.
class MemoryTrialLog final : public TrialSink {
public:
  void append(const TrialRecord& record) override {
    const std::lock_guard lock(mutex_);
    if (fail_next_) {
      fail_next_ = false;
      throw StorageError("simulated storage failure");
    }
    records_.push_back(record);
  }

  [[nodiscard]] std::vector<TrialRecord> records() const override {
    const std::lock_guard lock(mutex_);
    return records_;
  }

  void fail_next_append() {
    const std::lock_guard lock(mutex_);
    fail_next_ = true;
  }

private:
  std::vector<TrialRecord> records_;
  bool fail_next_ = false;
  mutable std::mutex mutex_;
};

} // namespace booster

#endif
