#include "jasmine/manifest.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "jasmine/dataset.hpp"
#include "text_util.hpp"

namespace jasmine {

namespace {

// Kept in sync with config/manifests/*.manifest (checked by tests).
constexpr std::string_view kNslKdd = R"(name = nslkdd
version = 1
columns = duration, protocol_type, service, flag, src_bytes, dst_bytes, land, wrong_fragment, urgent, hot, num_failed_logins, logged_in, num_compromised, root_shell, su_attempted, num_root, num_file_creations, num_shells, num_access_files, num_outbound_cmds, is_host_login, is_guest_login, count, srv_count, serror_rate, srv_serror_rate, rerror_rate, srv_rerror_rate, same_srv_rate, diff_srv_rate, srv_diff_host_rate, dst_host_count, dst_host_srv_count, dst_host_same_srv_rate, dst_host_diff_srv_rate, dst_host_same_src_port_rate, dst_host_srv_diff_host_rate, dst_host_serror_rate, dst_host_srv_serror_rate, dst_host_rerror_rate, dst_host_srv_rerror_rate, label, difficulty_level
label_columns = label, class, attack
label_encoding = negative_strings
negative_labels = normal
drop = protocol_type, service, flag, difficulty_level, difficulty
missing_value = 0
)";

constexpr std::string_view kUnsw = R"(name = unsw
version = 1
columns = srcip, sport, dstip, dsport, proto, state, dur, sbytes, dbytes, sttl, dttl, sloss, dloss, service, Sload, Dload, Spkts, Dpkts, swin, dwin, stcpb, dtcpb, smeansz, dmeansz, trans_depth, res_bdy_len, Sjit, Djit, Stime, Ltime, Sintpkt, Dintpkt, tcprtt, synack, ackdat, is_sm_ips_ports, ct_state_ttl, ct_flw_http_mthd, is_ftp_login, ct_ftp_cmd, ct_srv_src, ct_srv_dst, ct_dst_ltm, ct_src_ltm, ct_src_dport_ltm, ct_dst_sport_ltm, ct_dst_src_ltm, attack_cat, Label
label_columns = Label
label_encoding = binary
drop = srcip, sport, dstip, dsport, proto, state, service, stcpb, dtcpb, Stime, Ltime, attack_cat, id
missing_value = 0
)";

constexpr std::string_view kSynthetic = R"(name = synthetic
version = 1
columns =
label_columns = label
label_encoding = binary
drop =
missing_value = 0
)";

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  for (auto& item : detail::split(value, ',')) {
    auto trimmed = detail::trim(item);
    if (!trimmed.empty()) out.emplace_back(trimmed);
  }
  return out;
}

}  // namespace

DatasetManifest DatasetManifest::parse(std::string_view text) {
  DatasetManifest m;
  bool have_labels = false;
  for (const auto& [key, value] : detail::parse_key_values(text)) {
    if (key == "name") {
      m.name = value;
    } else if (key == "version") {
      m.version = std::stoi(value);
    } else if (key == "columns") {
      m.columns = split_list(value);
    } else if (key == "label_columns") {
      m.label_columns = split_list(value);
      have_labels = true;
    } else if (key == "label_encoding") {
      if (value == "negative_strings") {
        m.label_encoding = LabelEncoding::kNegativeStrings;
      } else if (value == "binary") {
        m.label_encoding = LabelEncoding::kBinary;
      } else {
        throw DataError("manifest: unknown label_encoding '" + value + "'");
      }
    } else if (key == "negative_labels") {
      m.negative_labels = split_list(value);
    } else if (key == "drop") {
      m.drop = split_list(value);
    } else if (key == "missing_value") {
      m.missing_value = std::stod(value);
    } else {
      throw DataError("manifest: unknown key '" + key + "'");
    }
  }
  if (!have_labels || m.label_columns.empty()) throw DataError("manifest: label_columns missing");
  return m;
}

DatasetManifest DatasetManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

DatasetManifest DatasetManifest::nslkdd() { return parse(kNslKdd); }
DatasetManifest DatasetManifest::unsw() { return parse(kUnsw); }
DatasetManifest DatasetManifest::synthetic() { return parse(kSynthetic); }

}  // namespace jasmine
