#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hab/abe/cpabe.h"
#include "hab/abe/document.h"
#include "hab/abe/policy.h"
#include "hab/audit/brokers_log.h"
#include "hab/broker/broker.h"
#include "hab/common/error.h"
#include "hab/sharing/shamir.h"

namespace py = pybind11;

namespace {

hab::Bytes as_bytes(const py::bytes& b) {
  std::string s = b;
  return hab::Bytes(s.begin(), s.end());
}

py::bytes to_py(const hab::Bytes& b) {
  return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

// Objects cross into Python in their canonical byte encodings.
py::tuple setup(int level) {
  auto kp = hab::abe::setup(level);
  return py::make_tuple(to_py(kp.public_params.serialize()), to_py(kp.master_secret.serialize()));
}

py::bytes keygen(const py::bytes& pp, const py::bytes& msk, const std::vector<std::string>& attrs) {
  auto p = hab::abe::PublicParams::deserialize(as_bytes(pp));
  auto m = hab::abe::MasterSecret::deserialize(as_bytes(msk));
  return to_py(hab::abe::keygen(p, m, hab::abe::AttributeSet(attrs)).serialize());
}

py::bytes encrypt(const py::bytes& pp, const std::string& policy, const py::bytes& plaintext) {
  auto p = hab::abe::PublicParams::deserialize(as_bytes(pp));
  return to_py(hab::abe::encrypt(p, hab::abe::parse_policy(policy), as_bytes(plaintext)).serialize());
}

py::bytes decrypt(const py::bytes& pp, const py::bytes& key, const py::bytes& document) {
  auto p = hab::abe::PublicParams::deserialize(as_bytes(pp));
  auto k = hab::abe::UserKey::deserialize(as_bytes(key));
  auto d = hab::abe::EncryptedDocument::deserialize(as_bytes(document));
  return to_py(hab::abe::decrypt(p, k, d));
}

std::vector<py::bytes> split(const py::bytes& data, int n, int t) {
  std::vector<py::bytes> out;
  for (const auto& s : hab::sharing::split(hab::Id128::random(), as_bytes(data), n, t))
    out.push_back(to_py(s.serialize()));
  return out;
}

py::bytes combine(const std::vector<py::bytes>& shares, int t) {
  std::vector<hab::sharing::Share> parsed;
  for (const auto& s : shares) parsed.push_back(hab::sharing::Share::deserialize(as_bytes(s)));
  return to_py(hab::sharing::combine(parsed, t));
}

py::dict verify_chain(const std::vector<std::string>& lines, std::optional<std::string> head) {
  auto st = hab::audit::verify_lines(lines, head);
  py::dict d;
  d["intact"] = st.intact;
  d["broken_at"] = st.broken_at ? py::cast(*st.broken_at) : py::none();
  d["reason"] = st.reason;
  return d;
}

}  // namespace

PYBIND11_MODULE(_habpy, m) {
  m.doc() = "Health Access Broker core: CP-ABE, threshold sharing, policy and log checks";

  static py::exception<hab::Error> error(m, "HabError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const hab::Error& e) {
      py::set_error(error, (std::string(hab::error_code_name(e.code())) + ": " + e.what()).c_str());
    }
  });

  m.def("supported_levels", &hab::abe::Group::supported_levels);
  m.def("setup", &setup, py::arg("level") = 128,
        "Returns (public_params, master_secret) as bytes.");
  m.def("keygen", &keygen, py::arg("public_params"), py::arg("master_secret"), py::arg("attributes"));
  m.def("encrypt", &encrypt, py::arg("public_params"), py::arg("policy"), py::arg("plaintext"));
  m.def("decrypt", &decrypt, py::arg("public_params"), py::arg("key"), py::arg("document"));

  m.def("normalize_policy", [](const std::string& text) { return hab::abe::parse_policy(text).to_string(); });
  m.def("satisfies", [](const std::string& policy, const std::vector<std::string>& attrs) {
    return hab::abe::satisfies(hab::abe::parse_policy(policy), hab::abe::AttributeSet(attrs));
  });

  m.def("split", &split, py::arg("data"), py::arg("n"), py::arg("t"));
  m.def("combine", &combine, py::arg("shares"), py::arg("t"));

  m.def("verify_chain", &verify_chain, py::arg("lines"), py::arg("head") = py::none());
  m.def("partition_of", &hab::broker::partition_of, py::arg("user_id"), py::arg("broker_count"));
}
