#pragma once

#include <string>
#include <vector>

#include "recon/field.hpp"
#include "recon/surface.hpp"

namespace recon {

/// Where a sample's orientation vector comes from when the file itself has no
/// normals. Per-point normals in the file always win when present.
struct OrientationSource {
    enum class Kind { FileNormals, ViewDir, ViewDirFile };
    Kind kind = Kind::FileNormals;
    Vec3 viewdir{0.0, 0.0, 0.0};   // one direction for every point
    std::string viewdir_file;      // one "x y z" line per input point
};

struct CloudReadResult {
    std::vector<PointSample> samples;
    /// Points dropped because their orientation vector had zero length.
    std::size_t rejected = 0;
};

/// Reads a point cloud from PLY (ascii or binary little-endian; properties
/// x,y,z and optionally nx,ny,nz) or whitespace text (3 or 6 numbers per
/// line, '#' comments allowed). Throws std::runtime_error with a specific
/// message for unparseable input, missing orientation, or zero surviving
/// points.
CloudReadResult read_cloud(const std::string& path, const OrientationSource& source);

/// Writes a mesh chosen by extension: .obj (text, 17 significant digits,
/// 1-based faces) or .ply (binary little-endian, float32 positions, int32
/// indices). Empty meshes produce a valid header-only/empty file.
void write_mesh(const TriangleMesh& mesh, const std::string& path);

/// Reads a triangle mesh back from a PLY file written by write_mesh (used by
/// round-trip checks and downstream tooling).
TriangleMesh read_mesh_ply(const std::string& path);

/// Six-column text: x y z nx ny nz, 17 significant digits.
void write_cloud_text(const std::vector<PointSample>& samples, const std::string& path);

}  // namespace recon
