#include "anytrack/kinematics.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace anytrack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dof(const KinematicChain& chain, const JointConfig& q) {
  if (q.size() != chain.dof()) {
    std::ostringstream msg;
    msg << "joint vector has " << q.size() << " entries, chain '" << chain.name() << "' has "
        << chain.dof() << " joints";
    throw std::invalid_argument(msg.str());
  }
}

// Transform contributed by one modified-DH joint.
Eigen::Isometry3d joint_transform(const ChainJoint& j, double theta) {
  const double ca = std::cos(j.alpha), sa = std::sin(j.alpha);
  const double ct = std::cos(theta + j.theta_offset), st = std::sin(theta + j.theta_offset);
  Eigen::Isometry3d t;
  t.matrix() << ct, -st, 0.0, j.a,
                st * ca, ct * ca, -sa, -sa * j.d,
                st * sa, ct * sa, ca, ca * j.d,
                0.0, 0.0, 0.0, 1.0;
  return t;
}

}  // namespace

Eigen::Quaterniond canonicalize(const Eigen::Quaterniond& q) {
  Eigen::Quaterniond out = q.normalized();
  if (out.w() < 0.0) out.coeffs() = -out.coeffs();
  return out;
}

Eigen::Vector3d quaternion_log(const Eigen::Quaterniond& q_in) {
  const Eigen::Quaterniond q = canonicalize(q_in);
  const Eigen::Vector3d v = q.vec();
  const double s = v.norm();
  if (s < 1e-12) return 2.0 * v / q.w();
  const double angle = 2.0 * std::atan2(s, q.w());
  return v * (angle / s);
}

Eigen::Quaterniond quaternion_exp(const Eigen::Vector3d& w) {
  const double angle = w.norm();
  if (angle < 1e-12) {
    return canonicalize(Eigen::Quaterniond(1.0, 0.5 * w.x(), 0.5 * w.y(), 0.5 * w.z()));
  }
  const Eigen::Vector3d axis = w / angle;
  const double h = 0.5 * angle;
  return Eigen::Quaterniond(std::cos(h), std::sin(h) * axis.x(), std::sin(h) * axis.y(),
                            std::sin(h) * axis.z());
}

Pose::Pose(const Eigen::Vector3d& p, const Eigen::Quaterniond& q)
    : position(p), orientation(canonicalize(q)) {}

Pose Pose::from_isometry(const Eigen::Isometry3d& iso) {
  return Pose(iso.translation(), Eigen::Quaterniond(iso.linear()));
}

Eigen::Isometry3d Pose::to_isometry() const {
  Eigen::Isometry3d iso = Eigen::Isometry3d::Identity();
  iso.linear() = orientation.toRotationMatrix();
  iso.translation() = position;
  return iso;
}

ToleranceSpec ToleranceSpec::free_axes(std::initializer_list<int> axes) {
  ToleranceSpec tol;
  for (int a : axes) {
    tol.lower[a] = -kInf;
    tol.upper[a] = kInf;
  }
  return tol;
}

bool ToleranceSpec::is_free(int axis) const {
  return std::isinf(lower[axis]) && lower[axis] < 0 && std::isinf(upper[axis]) && upper[axis] > 0;
}

void ToleranceSpec::validate() const {
  for (int i = 0; i < 6; ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > 0.0 || upper[i] < 0.0) {
      throw std::invalid_argument("tolerance axis " + std::to_string(i) +
                                  " must satisfy lower <= 0 <= upper");
    }
  }
}

KinematicChain::KinematicChain(std::string name, std::vector<ChainJoint> joints, Pose tool,
                               ToleranceSpec tolerance)
    : name_(std::move(name)),
      joints_(std::move(joints)),
      tool_(tool),
      tool_iso_(tool.to_isometry()),
      tolerance_(tolerance) {
  if (joints_.empty()) throw std::invalid_argument("chain needs at least one joint");
  if (joints_.size() > static_cast<std::size_t>(kMaxDof)) {
    throw std::invalid_argument("chain exceeds " + std::to_string(kMaxDof) + " joints");
  }
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    const auto& j = joints_[i];
    if (!(j.vel_max > 0.0) || !std::isfinite(j.vel_max)) {
      throw std::invalid_argument("joint " + std::to_string(i) + ": vel_max must be positive");
    }
    if (!(j.pos_lower < j.pos_upper)) {
      throw std::invalid_argument("joint " + std::to_string(i) + ": pos_lower must be < pos_upper");
    }
  }
  tolerance_.validate();
}

JointConfig KinematicChain::lower_limits() const {
  JointConfig q(dof());
  for (int i = 0; i < dof(); ++i) q[i] = joint(i).pos_lower;
  return q;
}

JointConfig KinematicChain::upper_limits() const {
  JointConfig q(dof());
  for (int i = 0; i < dof(); ++i) q[i] = joint(i).pos_upper;
  return q;
}

JointConfig KinematicChain::mid_config() const {
  return 0.5 * (lower_limits() + upper_limits());
}

JointConfig KinematicChain::clamp(const JointConfig& q) const {
  require_dof(*this, q);
  JointConfig out = q;
  for (int i = 0; i < dof(); ++i) out[i] = std::clamp(q[i], joint(i).pos_lower, joint(i).pos_upper);
  return out;
}

bool KinematicChain::within_limits(const JointConfig& q) const {
  if (q.size() != dof()) return false;
  for (int i = 0; i < dof(); ++i) {
    if (q[i] < joint(i).pos_lower || q[i] > joint(i).pos_upper) return false;
  }
  return true;
}

KinematicChain KinematicChain::with_tolerance(ToleranceSpec tolerance) const {
  return KinematicChain(name_, joints_, tool_, tolerance);
}

Pose forward_kinematics(const KinematicChain& chain, const JointConfig& q) {
  require_dof(chain, q);
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  for (int i = 0; i < chain.dof(); ++i) t = t * joint_transform(chain.joint(i), q[i]);
  return Pose::from_isometry(t * chain.tool_isometry());
}

KinematicState kinematic_state(const KinematicChain& chain, const JointConfig& q) {
  require_dof(chain, q);
  const int n = chain.dof();
  std::array<Eigen::Vector3d, kMaxDof> axes;
  std::array<Eigen::Vector3d, kMaxDof> origins;
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  for (int i = 0; i < n; ++i) {
    t = t * joint_transform(chain.joint(i), q[i]);
    axes[static_cast<std::size_t>(i)] = t.linear().col(2);
    origins[static_cast<std::size_t>(i)] = t.translation();
  }
  KinematicState state{t * chain.tool_isometry(), Jacobian(6, n)};
  const Eigen::Vector3d p = state.tool.translation();
  for (int i = 0; i < n; ++i) {
    const auto& z = axes[static_cast<std::size_t>(i)];
    state.jac.col(i).head<3>() = z.cross(p - origins[static_cast<std::size_t>(i)]);
    state.jac.col(i).tail<3>() = z;
  }
  return state;
}

Jacobian jacobian(const KinematicChain& chain, const JointConfig& q) {
  return kinematic_state(chain, q).jac;
}

Vector6 raw_pose_error(const Pose& current, const Pose& target) {
  const Eigen::Matrix3d rt = target.orientation.toRotationMatrix();
  Vector6 e;
  e.head<3>() = rt.transpose() * (current.position - target.position);
  e.tail<3>() = quaternion_log(target.orientation.conjugate() * current.orientation);
  return e;
}

Vector6 clamp_to_tolerance(const Vector6& raw, const ToleranceSpec& tol) {
  Vector6 e;
  for (int i = 0; i < 6; ++i) {
    const double c = raw[i];
    if (c > tol.upper[i]) {
      e[i] = c - tol.upper[i];
    } else if (c < tol.lower[i]) {
      e[i] = c - tol.lower[i];
    } else {
      e[i] = 0.0;
    }
  }
  return e;
}

Vector6 pose_error(const Pose& current, const Pose& target, const ToleranceSpec& tol) {
  return clamp_to_tolerance(raw_pose_error(current, target), tol);
}

namespace {

using nlohmann::json;

double bound_value(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    throw LoadError("unrecognised tolerance bound '" + s + "'");
  }
  return v.get<double>();
}

Vector6 read_vector6(const json& arr, const char* what) {
  if (!arr.is_array() || arr.size() != 6) {
    throw LoadError(std::string("tolerance.") + what + " must be an array of 6 values");
  }
  Vector6 v;
  for (int i = 0; i < 6; ++i) v[i] = bound_value(arr[static_cast<std::size_t>(i)]);
  return v;
}

}  // namespace

KinematicChain parse_chain(const std::string& json_text) {
  try {
    const json doc = json::parse(json_text);
    const auto name = doc.at("name").get<std::string>();
    const auto dof = doc.at("dof").get<int>();
    const auto& jarr = doc.at("joints");
    if (dof < 1) throw LoadError("dof must be >= 1");
    if (!jarr.is_array() || static_cast<int>(jarr.size()) != dof) {
      throw LoadError("'joints' must list exactly dof entries");
    }
    std::vector<ChainJoint> joints;
    for (const auto& j : jarr) {
      ChainJoint cj;
      cj.a = j.at("a").get<double>();
      cj.alpha = j.at("alpha").get<double>();
      cj.d = j.at("d").get<double>();
      cj.theta_offset = j.value("theta_offset", 0.0);
      cj.pos_lower = j.at("pos_lower").get<double>();
      cj.pos_upper = j.at("pos_upper").get<double>();
      cj.vel_max = j.at("vel_max").get<double>();
      joints.push_back(cj);
    }
    Pose tool;
    if (doc.contains("tool_transform")) {
      const auto& tt = doc.at("tool_transform");
      const auto p = tt.at("position").get<std::vector<double>>();
      const auto q = tt.at("quaternion").get<std::vector<double>>();
      if (p.size() != 3 || q.size() != 4) throw LoadError("tool_transform has wrong arity");
      const Eigen::Quaterniond quat(q[0], q[1], q[2], q[3]);
      if (std::abs(quat.norm() - 1.0) > 1e-6) throw LoadError("tool quaternion is not unit norm");
      tool = Pose({p[0], p[1], p[2]}, quat);
    }
    ToleranceSpec tol;
    if (doc.contains("tolerance")) {
      tol.lower = read_vector6(doc.at("tolerance").at("lower"), "lower");
      tol.upper = read_vector6(doc.at("tolerance").at("upper"), "upper");
    }
    return KinematicChain(name, std::move(joints), tool, tol);
  } catch (const LoadError&) {
    throw;
  } catch (const std::exception& e) {
    throw LoadError(std::string("invalid robot definition: ") + e.what());
  }
}

KinematicChain load_chain(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open robot definition " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_chain(buf.str());
  } catch (const LoadError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

}  // namespace anytrack
