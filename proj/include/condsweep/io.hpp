#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

#include "condsweep/encoder.hpp"
#include "condsweep/mesh.hpp"
#include "condsweep/pointcloud.hpp"
#include "condsweep/subspace.hpp"

namespace condsweep {

// Text point clouds: one "x y z" triple per line (17 significant digits on
// write); blank lines and '#' comments are skipped on read.
void write_xyz(std::ostream& out, const PointCloud& cloud);
PointCloud read_xyz(std::istream& in);

// Binary little-endian PLY holding float32 vertex positions. The reader
// accepts any scalar vertex properties as long as x, y and z are present.
void write_ply(std::ostream& out, const PointCloud& cloud);
PointCloud read_ply(std::istream& in);

/// Picks the format from the extension: .ply is binary PLY, anything else XYZ.
PointCloud read_point_cloud_file(const std::filesystem::path& path);
void write_point_cloud_file(const std::filesystem::path& path, const PointCloud& cloud);

// Wavefront OBJ, triangles only on write (9 significant digits). The reader
// ignores normals, texture coordinates, groups and comments, fan-triangulates
// polygons, and throws ParseError naming the offending line.
void write_obj(std::ostream& out, const TriangleMesh& mesh);
TriangleMesh read_obj(std::istream& in);
void write_obj_file(const std::filesystem::path& path, const TriangleMesh& mesh);
TriangleMesh read_obj_file(const std::filesystem::path& path);

// CVEC: "CVEC", u32 version 1, u64 dim, dim float32.
// CVBT: "CVBT", u32 version 1, u64 count, u64 dim, count*dim float32 row-major.
// All integers and floats little-endian. The formats carry no encoder tag, so
// readers take the tag to stamp on the result.
void write_cvec(std::ostream& out, const ConditionVector& c);
ConditionVector read_cvec(std::istream& in, const std::string& encoder_id = "");
void write_cvbt(std::ostream& out, const std::vector<ConditionVector>& batch);
std::vector<ConditionVector> read_cvbt(std::istream& in, const std::string& encoder_id = "");

/// Reads either a CVEC or a CVBT file, always returning a batch.
std::vector<ConditionVector> read_conditions_file(const std::filesystem::path& path,
                                                  const std::string& encoder_id = "");

// PCAM: "PCAM", u32 version 1, u64 C, u64 d, u64 k, then mean (C), modes
// (d x C row-major), stds (d), explained (d), all float32.
void write_pcam(std::ostream& out, const PcaModel& model);
PcaModel read_pcam(std::istream& in, const std::string& encoder_id = "");

}  // namespace condsweep
