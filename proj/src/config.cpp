#include "vdcsim/config.hpp"

#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "vdcsim/zwidth.hpp"

namespace vdcsim {

namespace {

Vec3 parse_vec3(const YAML::Node& n, const char* what) {
  if (!n.IsSequence() || n.size() != 3) {
    throw ConfigError(std::string(what) + ": expected a 3-vector");
  }
  return Vec3(n[0].as<double>(), n[1].as<double>(), n[2].as<double>());
}

Vec6 parse_vec6(const YAML::Node& n, const char* what) {
  if (!n.IsSequence() || n.size() != 6) {
    throw ConfigError(std::string(what) + ": expected a 6-vector");
  }
  Vec6 v;
  for (int i = 0; i < 6; ++i) {
    v(i) = n[i].as<double>();
  }
  return v;
}

VecX parse_vecx(const YAML::Node& n, const char* what) {
  if (!n.IsSequence()) {
    throw ConfigError(std::string(what) + ": expected a sequence");
  }
  VecX v(n.size());
  for (size_t i = 0; i < n.size(); ++i) {
    v(i) = n[i].as<double>();
  }
  return v;
}

/// Matrix shorthand: scalar -> s*I, 6 scalars -> diagonal, 6 rows of 6 ->
/// full matrix.
Mat6 parse_mat6(const YAML::Node& n, const char* what) {
  if (n.IsScalar()) {
    return n.as<double>() * Mat6::Identity();
  }
  if (n.IsSequence() && n.size() == 6 && n[0].IsScalar()) {
    return parse_vec6(n, what).asDiagonal();
  }
  if (n.IsSequence() && n.size() == 6 && n[0].IsSequence()) {
    Mat6 m;
    for (int r = 0; r < 6; ++r) {
      if (!n[r].IsSequence() || n[r].size() != 6) {
        throw ConfigError(std::string(what) + ": expected 6x6 rows");
      }
      for (int c = 0; c < 6; ++c) {
        m(r, c) = n[r][c].as<double>();
      }
    }
    return m;
  }
  throw ConfigError(std::string(what) +
                    ": expected scalar, 6-vector diagonal, or 6x6 matrix");
}

Mat3 rotation_from_rpy(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy(0), Vec3::UnitX()) *
          Eigen::AngleAxisd(rpy(1), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy(2), Vec3::UnitZ()))
      .toRotationMatrix();
}

ChainModel parse_model(const YAML::Node& n) {
  if (n["preset"]) {
    const auto preset = n["preset"].as<std::string>();
    if (preset == "planar_3r") {
      ChainModel m = planar_3r_model();
      if (n["gravity"]) {
        m.gravity = parse_vec3(n["gravity"], "model.gravity");
      }
      return m;
    }
    throw ConfigError("model.preset: unknown preset '" + preset + "'");
  }
  ChainModel m;
  if (n["base_frame"]) {
    m.base_frame = n["base_frame"].as<std::string>();
  }
  if (n["tip_frame"]) {
    m.tip_frame = n["tip_frame"].as<std::string>();
  }
  if (n["gravity"]) {
    m.gravity = parse_vec3(n["gravity"], "model.gravity");
  }
  const YAML::Node joints = n["joints"];
  const YAML::Node bodies = n["bodies"];
  if (!joints || !bodies || joints.size() != bodies.size() ||
      joints.size() == 0) {
    throw ConfigError("model: joints and bodies must be nonempty equal-length lists");
  }
  for (size_t i = 0; i < joints.size(); ++i) {
    const YAML::Node jn = joints[i];
    JointDesc j;
    j.name = jn["name"] ? jn["name"].as<std::string>()
                        : "joint" + std::to_string(i + 1);
    if (jn["type"]) {
      const auto type = jn["type"].as<std::string>();
      if (type == "revolute") {
        j.type = JointType::Revolute;
      } else if (type == "prismatic") {
        j.type = JointType::Prismatic;
      } else {
        throw ConfigError("model.joints.type: unknown type '" + type + "'");
      }
    }
    if (jn["axis"]) {
      j.axis = parse_vec3(jn["axis"], "model.joints.axis");
    }
    if (jn["zero_rpy"]) {
      j.zero_rotation = rotation_from_rpy(parse_vec3(jn["zero_rpy"], "zero_rpy"));
    }
    if (jn["zero_offset"]) {
      j.zero_offset = parse_vec3(jn["zero_offset"], "zero_offset");
    }
    if (jn["friction"]) {
      j.viscous_friction = jn["friction"].as<double>();
    }
    if (jn["limits"]) {
      if (!jn["limits"].IsSequence() || jn["limits"].size() != 2) {
        throw ConfigError("model.joints.limits: expected [lower, upper]");
      }
      j.limit_lower = jn["limits"][0].as<double>();
      j.limit_upper = jn["limits"][1].as<double>();
    }
    m.joints.push_back(j);
    m.body_frames.push_back("link" + std::to_string(i + 1));

    const YAML::Node bn = bodies[i];
    InertialParams b;
    b.mass = bn["mass"].as<double>();
    if (bn["com"]) {
      b.first_moment = b.mass * parse_vec3(bn["com"], "model.bodies.com");
    } else if (bn["first_moment"]) {
      b.first_moment = parse_vec3(bn["first_moment"], "first_moment");
    }
    if (bn["inertia"]) {
      const YAML::Node in = bn["inertia"];
      if (!in.IsSequence() || in.size() != 6) {
        throw ConfigError(
            "model.bodies.inertia: expected [Ixx, Iyy, Izz, Ixy, Ixz, Iyz]");
      }
      b.rot_inertia << in[0].as<double>(), in[3].as<double>(), in[4].as<double>(),
          in[3].as<double>(), in[1].as<double>(), in[5].as<double>(),
          in[4].as<double>(), in[5].as<double>(), in[2].as<double>();
    }
    m.bodies.push_back(b);
  }
  if (n["tip_offset"]) {
    m.tip_offset = parse_vec3(n["tip_offset"], "model.tip_offset");
  }
  if (n["tip_rpy"]) {
    m.tip_rotation = rotation_from_rpy(parse_vec3(n["tip_rpy"], "tip_rpy"));
  }
  return m;
}

std::vector<Mat6> parse_k_body(const YAML::Node& n, int dof) {
  std::vector<Mat6> ks;
  if (!n || n.IsNull()) {
    ks.assign(dof, 60.0 * Mat6::Identity());
    return ks;
  }
  if (n.IsScalar()) {
    ks.assign(dof, n.as<double>() * Mat6::Identity());
    return ks;
  }
  if (n.IsSequence() && static_cast<int>(n.size()) == dof) {
    for (const YAML::Node& e : n) {
      ks.push_back(parse_mat6(e, "controller.K_body"));
    }
    return ks;
  }
  throw ConfigError("controller.K_body: scalar or one entry per joint");
}

ExperimentConfig parse_config_node(const YAML::Node& root) {
  ExperimentConfig cfg;
  if (root["model"]) {
    cfg.model = parse_model(root["model"]);
  } else {
    cfg.model = planar_3r_model();
  }

  if (const YAML::Node n = root["impedance"]) {
    ImpedanceSpec& s = cfg.impedance;
    if (n["M_d"]) s.M_d = parse_mat6(n["M_d"], "impedance.M_d");
    if (n["D_d"]) s.D_d = parse_mat6(n["D_d"], "impedance.D_d");
    if (n["K_d"]) s.K_d = parse_mat6(n["K_d"], "impedance.K_d");
    if (n["Lambda"]) s.Lambda = parse_mat6(n["Lambda"], "impedance.Lambda");
    if (n["theta_psi"])
      s.theta_psi = parse_mat6(n["theta_psi"], "impedance.theta_psi");
    if (n["theta_e"]) s.theta_e = parse_mat6(n["theta_e"], "impedance.theta_e");
  }

  if (const YAML::Node n = root["adaptation"]) {
    if (n["gamma"]) cfg.gamma = n["gamma"].as<double>();
    if (n["initial_scale"])
      cfg.initial_estimate_scale = n["initial_scale"].as<double>();
    if (n["enabled"]) cfg.adapt_enabled = n["enabled"].as<bool>();
  }

  const YAML::Node ctrl = root["controller"];
  cfg.K_body = parse_k_body(ctrl ? ctrl["K_body"] : YAML::Node(),
                            cfg.model.dof());
  if (ctrl) {
    if (ctrl["pinv_sigma_threshold"])
      cfg.pinv_sigma_threshold = ctrl["pinv_sigma_threshold"].as<double>();
    if (ctrl["pinv_lambda"]) cfg.pinv_lambda = ctrl["pinv_lambda"].as<double>();
    if (ctrl["force_filter_cutoff_hz"])
      cfg.force_filter_cutoff_hz = ctrl["force_filter_cutoff_hz"].as<double>();
    if (ctrl["tip_wrench_mode"]) {
      const auto mode = ctrl["tip_wrench_mode"].as<std::string>();
      if (mode == "desired") {
        cfg.tip_wrench_mode = TipWrenchMode::Desired;
      } else if (mode == "measured") {
        cfg.tip_wrench_mode = TipWrenchMode::Measured;
      } else {
        throw ConfigError("controller.tip_wrench_mode: 'desired' or 'measured'");
      }
    }
  }

  if (const YAML::Node n = root["wall"]) {
    cfg.wall.enabled = n["enabled"] ? n["enabled"].as<bool>() : true;
    if (n["stiffness"]) cfg.wall.stiffness = n["stiffness"].as<double>();
    if (n["position"]) cfg.wall.position = n["position"].as<double>();
    if (n["axis"]) cfg.wall.axis = n["axis"].as<int>();
    if (n["unilateral"]) cfg.wall.unilateral = n["unilateral"].as<bool>();
    if (n["side"]) {
      const auto side = n["side"].as<std::string>();
      if (side == "below") {
        cfg.wall.side_below = true;
      } else if (side == "above") {
        cfg.wall.side_below = false;
      } else {
        throw ConfigError("wall.side: 'below' or 'above'");
      }
    }
  }

  if (const YAML::Node n = root["trajectory"]) {
    if (n["start"]) {
      cfg.trajectory_start = parse_vec6(n["start"], "trajectory.start");
    }
    if (const YAML::Node steps = n["steps"]) {
      for (const YAML::Node& sn : steps) {
        TrajectoryStep s;
        if (sn["target"]) {
          s.target = parse_vec6(sn["target"], "trajectory.steps.target");
        } else if (sn["offset"]) {
          s.target = parse_vec6(sn["offset"], "trajectory.steps.offset");
          s.relative = true;
        } else {
          throw ConfigError("trajectory.steps: need target or offset");
        }
        if (sn["duration"]) s.duration = sn["duration"].as<double>();
        if (sn["hold"]) s.hold = sn["hold"].as<double>();
        cfg.trajectory.push_back(s);
      }
    }
  }

  if (const YAML::Node n = root["desired_force"]) {
    if (n["mode"]) {
      const auto mode = n["mode"].as<std::string>();
      if (mode == "constant") {
        cfg.desired_force_mode = DesiredForceMode::Constant;
      } else if (mode == "wall_consistent") {
        cfg.desired_force_mode = DesiredForceMode::WallConsistent;
      } else {
        throw ConfigError("desired_force.mode: 'constant' or 'wall_consistent'");
      }
    }
    if (n["value"]) {
      cfg.desired_force = parse_vec6(n["value"], "desired_force.value");
    }
    if (n["contact_only"]) {
      cfg.desired_force_contact_only = n["contact_only"].as<bool>();
    }
  }

  if (const YAML::Node n = root["force_step"]) {
    ForceStep fs;
    if (n["channel"]) fs.channel = n["channel"].as<int>();
    if (n["magnitude"]) fs.magnitude = n["magnitude"].as<double>();
    if (n["start"]) fs.start = n["start"].as<double>();
    cfg.force_step = fs;
  }

  if (const YAML::Node n = root["run"]) {
    if (n["dt"]) cfg.run.dt = n["dt"].as<double>();
    if (n["duration"]) cfg.run.duration = n["duration"].as<double>();
    if (n["seed"]) cfg.run.seed = n["seed"].as<std::uint64_t>();
    if (n["plant"]) {
      const auto plant = n["plant"].as<std::string>();
      if (plant == "chain") {
        cfg.run.plant = PlantMode::Chain;
      } else if (plant == "ideal") {
        cfg.run.plant = PlantMode::Ideal;
      } else {
        throw ConfigError("run.plant: 'chain' or 'ideal'");
      }
    }
    if (n["initial_q"]) {
      cfg.run.initial_q = parse_vecx(n["initial_q"], "run.initial_q");
    }
    if (n["telemetry"]) cfg.run.telemetry_path = n["telemetry"].as<std::string>();
    if (n["summary"]) cfg.run.summary_path = n["summary"].as<std::string>();
  }
  if (cfg.run.initial_q.size() == 0 && cfg.run.plant == PlantMode::Chain) {
    if (cfg.model.body_frames == planar_3r_model().body_frames) {
      cfg.run.initial_q = planar_3r_home();
    }
  }

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

}  // namespace

ExperimentConfig parse_config(const std::string& yaml_text) {
  try {
    return parse_config_node(YAML::Load(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("yaml parse error: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ZWidthParams parse_zwidth_params(const std::string& yaml_text) {
  ZWidthParams p;
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("yaml parse error: ") + e.what());
  }
  const YAML::Node n = root["zwidth"];
  if (!n) {
    return p;
  }
  if (n["m_d"]) {
    p.m_d_values.clear();
    for (const YAML::Node& v : n["m_d"]) {
      p.m_d_values.push_back(v.as<double>());
    }
  }
  if (n["ke_min"]) p.ke_min = n["ke_min"].as<double>();
  if (n["ke_max"]) p.ke_max = n["ke_max"].as<double>();
  if (n["ke_tolerance"]) p.ke_tolerance = n["ke_tolerance"].as<double>();
  if (n["max_bounces"]) p.max_bounces = n["max_bounces"].as<int>();
  if (n["stability_budget"]) p.stability_budget = n["stability_budget"].as<double>();
  if (n["parallel"]) p.parallel = n["parallel"].as<bool>();
  if (p.m_d_values.empty()) {
    throw ConfigError("zwidth.m_d: grid must be nonempty");
  }
  if (!(p.ke_min > 0.0) || !(p.ke_max > p.ke_min)) {
    throw ConfigError("zwidth: need 0 < ke_min < ke_max");
  }
  return p;
}

ZWidthParams load_zwidth_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_zwidth_params(ss.str());
}

ChainModel planar_3r_model() {
  ChainModel m;
  m.base_frame = "base";
  m.tip_frame = "tip";
  m.gravity = Vec3(0.0, 0.0, -9.81);

  const double lengths[3] = {0.45, 0.40, 0.35};
  const double masses[3] = {5.0, 3.5, 2.0};
  const double frictions[3] = {0.5, 0.4, 0.3};
  const double radius = 0.05;

  for (int i = 0; i < 3; ++i) {
    JointDesc j;
    j.name = "j" + std::to_string(i + 1);
    j.type = JointType::Revolute;
    j.axis = Vec3::UnitZ();
    j.zero_offset = (i == 0) ? Vec3::Zero() : Vec3(lengths[i - 1], 0.0, 0.0);
    j.viscous_friction = frictions[i];
    j.limit_lower = -2.8;
    j.limit_upper = 2.8;
    m.joints.push_back(j);
    m.body_frames.push_back("link" + std::to_string(i + 1));

    // Uniform rod along +x from the joint, length L, radius r, inertia
    // about the joint end.
    InertialParams b;
    const double len = lengths[i];
    b.mass = masses[i];
    b.first_moment = Vec3(b.mass * len / 2.0, 0.0, 0.0);
    const double i_axial = 0.5 * b.mass * radius * radius;
    const double i_bend =
        b.mass * len * len / 3.0 + 0.25 * b.mass * radius * radius;
    b.rot_inertia = Vec3(i_axial, i_bend, i_bend).asDiagonal();
    m.bodies.push_back(b);
  }
  m.tip_offset = Vec3(lengths[2], 0.0, 0.0);
  return m;
}

VecX planar_3r_home() {
  VecX q(3);
  q << -0.8, 1.4, 0.6;
  return q;
}

ExperimentConfig default_contact_experiment() {
  ExperimentConfig cfg;
  cfg.model = planar_3r_model();
  ImpedanceSpec& s = cfg.impedance;
  s.M_d = Vec6(1, 1, 2.2, 1, 1, 1).asDiagonal();
  s.D_d = 80.0 * Mat6::Identity();
  s.K_d = 200.0 * Mat6::Identity();
  s.Lambda = Vec6(-40, -40, -36, -40, -40, -40).asDiagonal();
  s.theta_psi = Vec6(10, 10, 15, 10, 10, 10).asDiagonal();
  s.theta_e = Vec6(15, 15, 8, 20, 20, 20).asDiagonal();
  cfg.gamma = 10.0;
  cfg.initial_estimate_scale = 0.5;
  cfg.adapt_enabled = true;
  cfg.K_body.assign(3, 25.0 * Mat6::Identity());

  const KinematicsCache kin = compute_kinematics(cfg.model, planar_3r_home());
  const double tip_y = tip_pose(kin.base_to_tip).pose(1);

  cfg.wall.enabled = true;
  cfg.wall.stiffness = 1000.0;
  cfg.wall.position = tip_y + 0.04;
  cfg.wall.axis = 1;
  cfg.wall.unilateral = true;
  cfg.wall.side_below = false;

  cfg.desired_force_mode = DesiredForceMode::WallConsistent;

  TrajectoryStep approach;
  approach.target = Vec6::Zero();
  approach.target(1) = 0.06;
  approach.relative = true;
  approach.duration = 1.5;
  approach.hold = 0.5;
  cfg.trajectory.push_back(approach);

  cfg.run.dt = 1e-3;
  cfg.run.duration = 5.0;
  cfg.run.plant = PlantMode::Chain;
  cfg.run.initial_q = planar_3r_home();
  return cfg;
}

}  // namespace vdcsim
