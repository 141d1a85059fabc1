#pragma once

// Built-in connectors: a directory-of-JSON fixture source and three read-only
// remote adapters shaped after DBLP, OpenAlex and Zenodo search endpoints.

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "fedqa/federation.hpp"

namespace fedqa::federation {

/// One JSON object per *.json file, read in filename order. A file matches
/// when the query is a case-insensitive substring of any field value.
class FixtureConnector final : public Connector {
 public:
  FixtureConnector(std::string source_id, std::filesystem::path directory, Seconds delay = Seconds{0});

  std::vector<SourceRecord> fetch(const std::string& query, std::stop_token stop) override;

  /// Loads every record without filtering. Throws Error(kIoError).
  std::vector<SourceRecord> load_all() const;

 private:
  std::string source_id_;
  std::filesystem::path directory_;
  Seconds delay_;
};

/// Parses a single fixture/native JSON object into payload-ordered fields.
/// Strings are kept verbatim, arrays become string lists (non-string elements
/// are JSON-serialized), other scalars and objects are JSON-serialized, and
/// nulls are dropped.
NativeFields parse_native_object(std::string_view json_object);

class RemoteAdapter : public Connector {
 public:
  explicit RemoteAdapter(SourceDescriptor descriptor);

  std::vector<SourceRecord> fetch(const std::string& query, std::stop_token stop) override;

  /// Turns one response body into records. Throws Error(kParseError).
  virtual std::vector<SourceRecord> parse_payload(std::string_view body) const = 0;

 protected:
  /// Query-string parameters for one search request.
  virtual std::vector<std::pair<std::string, std::string>> request_params(const std::string& query) const = 0;

  const SourceDescriptor& descriptor() const noexcept { return descriptor_; }

 private:
  SourceDescriptor descriptor_;
};

class DblpAdapter final : public RemoteAdapter {
 public:
  using RemoteAdapter::RemoteAdapter;
  std::vector<SourceRecord> parse_payload(std::string_view body) const override;

 protected:
  std::vector<std::pair<std::string, std::string>> request_params(const std::string& query) const override;
};

class OpenAlexAdapter final : public RemoteAdapter {
 public:
  using RemoteAdapter::RemoteAdapter;
  std::vector<SourceRecord> parse_payload(std::string_view body) const override;

 protected:
  std::vector<std::pair<std::string, std::string>> request_params(const std::string& query) const override;
};

class ZenodoAdapter final : public RemoteAdapter {
 public:
  using RemoteAdapter::RemoteAdapter;
  std::vector<SourceRecord> parse_payload(std::string_view body) const override;

 protected:
  std::vector<std::pair<std::string, std::string>> request_params(const std::string& query) const override;
};

/// Connector for a descriptor's kind/adapter. Throws Error(kInvalidDescriptor)
/// for an unknown adapter name.
std::shared_ptr<Connector> make_connector(const SourceDescriptor& descriptor);

/// Field names each reference adapter can emit; used to check field-map totality.
std::vector<std::string> adapter_field_names(std::string_view adapter);

}  // namespace fedqa::federation
