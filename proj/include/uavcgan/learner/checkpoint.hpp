#pragma once

#include <sstream>
#include <string>

#include "uavcgan/core/csv.hpp"
#include "uavcgan/learner/gan.hpp"

namespace uavcgan::learner {

inline constexpr const char* kCheckpointMagic = "uavcgan-checkpoint 1";

namespace detail {

inline void write_net(std::ostringstream& os, const char* name, const DenseNet& net) {
  os << name << " layers";
  for (int n : net.layers()) os << ' ' << n;
  os << " slope " << csv::format_double(net.leaky_slope()) << '\n' << "params " << net.params().size() << '\n';
  for (Eigen::Index k = 0; k < net.params().size(); ++k) os << csv::format_double(net.params()[k]) << '\n';
}

inline DenseNet read_net(std::istringstream& is, const std::string& name) {
  std::string tag, word;
  is >> tag >> word;
  require(tag == name && word == "layers", ErrorKind::IoError, "checkpoint: expected '" + name + " layers'");
  std::vector<int> layers;
  while (is >> word && word != "slope") layers.push_back(csv::parse_int(word));
  is >> word;
  DenseNet net(layers, csv::parse_double(word));
  long count = 0;
  is >> word >> count;
  require(word == "params" && count == net.params().size(), ErrorKind::IoError,
          "checkpoint: parameter count does not match architecture of " + name);
  for (Eigen::Index k = 0; k < count; ++k) {
    require(static_cast<bool>(is >> word), ErrorKind::IoError, "checkpoint: truncated parameters");
    net.params()[k] = csv::parse_double(word);
  }
  return net;
}

}  // namespace detail

/// Plain-text dump: architecture header, generator and discriminator weights, scaler statistics.
inline std::string checkpoint_to_text(const LearnerState& s) {
  std::ostringstream os;
  os << kCheckpointMagic << '\n'
     << "noise_dim " << s.gen.noise_dim << " directions " << s.gen.directions << '\n';
  detail::write_net(os, "generator", s.gen.net);
  detail::write_net(os, "discriminator", s.disc.net);
  os << "scaler\n";
  for (int d = 0; d < s.scaler.directions(); ++d) {
    const auto k = static_cast<std::size_t>(d);
    os << csv::format_double(s.scaler.mean_re[k]) << ' ' << csv::format_double(s.scaler.mean_im[k]) << ' '
       << csv::format_double(s.scaler.std_re[k]) << ' ' << csv::format_double(s.scaler.std_im[k]) << '\n';
  }
  return os.str();
}

/// Restores networks and scaler; optimiser state starts fresh.
inline LearnerState checkpoint_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  require(line == kCheckpointMagic, ErrorKind::IoError, "not a checkpoint file");
  std::string a, b;
  LearnerState s;
  is >> a >> s.gen.noise_dim >> b >> s.gen.directions;
  require(a == "noise_dim" && b == "directions", ErrorKind::IoError, "checkpoint: bad header");
  s.disc.directions = s.gen.directions;
  s.gen.net = detail::read_net(is, "generator");
  s.disc.net = detail::read_net(is, "discriminator");
  is >> a;
  require(a == "scaler", ErrorKind::IoError, "checkpoint: missing scaler");
  s.scaler = Scaler::identity(s.gen.directions);
  for (std::size_t k = 0; k < static_cast<std::size_t>(s.gen.directions); ++k) {
    std::string v[4];
    require(static_cast<bool>(is >> v[0] >> v[1] >> v[2] >> v[3]), ErrorKind::IoError, "checkpoint: truncated scaler");
    s.scaler.mean_re[k] = csv::parse_double(v[0]);
    s.scaler.mean_im[k] = csv::parse_double(v[1]);
    s.scaler.std_re[k] = csv::parse_double(v[2]);
    s.scaler.std_im[k] = csv::parse_double(v[3]);
  }
  return s;
}

}  // namespace uavcgan::learner
