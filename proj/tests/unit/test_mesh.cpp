#include "helpers.hpp"
#include "stylexfer/error.hpp"
#include "stylexfer/mesh_io.hpp"
#include "stylexfer/shapes.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace stylexfer;
using namespace stylexfer::shapes;
using testing_util::v3;

TEST(HalfEdge, IcosphereConnectivity) {
    for (int level = 0; level <= 3; ++level) {
        const Mesh m = icosphere(level);
        EXPECT_EQ(m.num_vertices(), 10 * (1 << (2 * level)) + 2);
        const HalfEdgeMesh hem(m);
        EXPECT_TRUE(hem.check_involutions());
        EXPECT_EQ(hem.num_edges() * 2, m.num_faces() * 3);
        const TopologyReport r = analyze_topology(m);
        EXPECT_EQ(r.euler_characteristic, 2);
        EXPECT_TRUE(r.boundary_edges.empty());
    }
}

TEST(HalfEdge, OneRingOfIcosahedronVertexHasFiveNeighbours) {
    const Mesh m = icosphere(0);
    const HalfEdgeMesh hem(m);
    for (int v = 0; v < m.num_vertices(); ++v) EXPECT_EQ(hem.one_ring(v).size(), 5u);
}

TEST(HalfEdge, DuplicateDirectedEdgeThrows) {
    Mesh m;
    m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
    m.faces = {{0, 1, 2}, {0, 1, 3}};  // edge 0->1 used twice
    EXPECT_THROW(HalfEdgeMesh{m}, TopologyError);
}

TEST(Topology, OpenGridIsRejected) {
    Mesh grid = plane_grid(4);
    const TopologyReport r = analyze_topology(grid);
    EXPECT_FALSE(r.boundary_edges.empty());
    EXPECT_THROW(require_genus_zero(grid), TopologyError);
}

TEST(Geometry, VertexAreasSumToTotalArea) {
    const Mesh m = egg(3, 1.0, 1.4, 0.3);
    const auto areas = vertex_areas(m.vertices, m.faces);
    double sum = 0.0;
    for (double a : areas) sum += a;
    EXPECT_NEAR(sum, total_area(m), 1e-12 * total_area(m));
}

TEST(Geometry, IcosphereAreaApproachesSphere) {
    const Mesh m = icosphere(5, 2.0);
    EXPECT_NEAR(total_area(m), 4 * M_PI * 4.0, 0.01 * 4 * M_PI * 4.0);
}

TEST(Geometry, CotangentWeightsMatchAngleOracle) {
    const Mesh m = ellipsoid(2, 1.0, 1.5, 0.7);
    const HalfEdgeMesh hem(m);
    const auto w = cotangent_weights(m.vertices, hem);
    for (std::size_t e = 0; e < hem.edges().size(); ++e) {
        const int h = hem.edges()[e];
        auto corner = [&](int he) {
            const int a = hem.origin(he), b = hem.dest(he), c = hem.origin(hem.prev(he));
            return oracle::cot_angle(v3(m.vertices[a]), v3(m.vertices[c]), v3(m.vertices[b]));
        };
        double expected = corner(h);
        if (hem.twin(h) >= 0) expected += corner(hem.twin(h));
        expected = std::max(0.0, expected / 2.0);
        EXPECT_NEAR(w[e], expected, 1e-10);
    }
}

TEST(Geometry, SphereCurvatureIsInverseRadius) {
    const Mesh m = icosphere(4, 2.5);
    const HalfEdgeMesh hem(m);
    for (double k : normal_curvatures(m, hem)) EXPECT_NEAR(k, 1.0 / 2.5, 1e-2);
}

TEST(Geometry, SubmeshKeepsChannels) {
    Mesh m = icosphere(1);
    std::vector<double> ids(m.num_vertices());
    for (int i = 0; i < m.num_vertices(); ++i) ids[i] = i;
    m.set_scalar("id", ids);
    const std::vector<int> faces{0, 1, 2};
    const SubMesh sub = extract_submesh(m, faces);
    ASSERT_EQ(sub.mesh.num_faces(), 3);
    for (int i = 0; i < sub.mesh.num_vertices(); ++i) {
        EXPECT_EQ(sub.mesh.scalar("id")[i], sub.vertex_map[i]);
        EXPECT_EQ(sub.mesh.vertices[i], m.vertices[sub.vertex_map[i]]);
    }
}

TEST(Mesh, ChannelLengthIsChecked) {
    Mesh m = icosphere(0);
    EXPECT_THROW(m.set_scalar("x", std::vector<double>(3)), InvalidArgument);
    EXPECT_THROW(m.scalar("missing"), InvalidArgument);
}

class MeshIo : public ::testing::TestWithParam<PlyEncoding> {};

TEST_P(MeshIo, PlyRoundTripKeepsChannels) {
    const auto dir = testing_util::scratch_dir("meshio");
    Mesh m = icosphere(2);
    std::vector<double> s(m.num_vertices());
    std::vector<Vec3> rgb(m.num_vertices()), sphere(m.num_vertices());
    for (int i = 0; i < m.num_vertices(); ++i) {
        s[i] = 0.001 * i;
        rgb[i] = Vec3((i % 256) / 255.0, ((3 * i) % 256) / 255.0, ((7 * i) % 256) / 255.0);
        sphere[i] = m.vertices[i].normalized();
    }
    m.set_scalar("concentration", s);
    m.set_scalar(channel::kPatchId, std::vector<double>(m.num_vertices(), 3.0));
    m.set_vector(channel::kBispectral, rgb);
    m.set_vector(channel::kSphere, sphere);
    SaveOptions o;
    o.encoding = GetParam();
    o.comments = {"seed 7"};
    save_mesh(m, dir / "m.ply", o);
    const Mesh r = load_mesh(dir / "m.ply");
    ASSERT_EQ(r.num_vertices(), m.num_vertices());
    ASSERT_EQ(r.faces, m.faces);
    for (int i = 0; i < m.num_vertices(); ++i) {
        EXPECT_NEAR(r.scalar("concentration")[i], s[i], 1e-6);
        EXPECT_EQ(r.scalar(channel::kPatchId)[i], 3.0);
        EXPECT_NEAR((r.vector(channel::kBispectral)[i] - rgb[i]).norm(), 0.0, 1e-9);
        EXPECT_NEAR((r.vector(channel::kSphere)[i] - sphere[i]).norm(), 0.0, 1e-6);
    }
}

TEST_P(MeshIo, SaveIsByteDeterministic) {
    const auto dir = testing_util::scratch_dir("meshio_det");
    Mesh m = icosphere(1);
    m.set_scalar("c", std::vector<double>(m.num_vertices(), 0.25));
    SaveOptions o;
    o.encoding = GetParam();
    save_mesh(m, dir / "a.ply", o);
    save_mesh(m, dir / "b.ply", o);
    std::ifstream a(dir / "a.ply", std::ios::binary), b(dir / "b.ply", std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
    EXPECT_EQ(sa, sb);
}

INSTANTIATE_TEST_SUITE_P(Encodings, MeshIo, ::testing::Values(PlyEncoding::kBinaryLittleEndian, PlyEncoding::kAscii));

TEST(MeshIoErrors, ObjWithSidecar) {
    const auto dir = testing_util::scratch_dir("obj");
    {
        std::ofstream obj(dir / "t.obj");
        obj << "v 1 0 0\nv -1 0 0\nv 0 1 0\nv 0 0 1\nf 1 3 4\nf 3 2 4\nf 2 1 4\nf 1 2 3\n";
        std::ofstream side(dir / "t.obj.json");
        side << R"({"concentration": [0.1, 0.2, 0.3, 0.4], "bispectral_rgb": [[1,0,0],[0,1,0],[0,0,1],[1,1,1]]})";
    }
    const Mesh m = load_mesh(dir / "t.obj");
    EXPECT_EQ(m.num_vertices(), 4);
    EXPECT_DOUBLE_EQ(m.scalar("concentration")[2], 0.3);
    EXPECT_EQ(m.vector(channel::kBispectral)[3], Vec3(1, 1, 1));
}

TEST(MeshIoErrors, SidecarLengthMismatchNamesChannel) {
    const auto dir = testing_util::scratch_dir("obj_bad");
    {
        std::ofstream obj(dir / "t.obj");
        obj << "v 1 0 0\nv -1 0 0\nv 0 1 0\nv 0 0 1\nf 1 3 4\nf 3 2 4\nf 2 1 4\nf 1 2 3\n";
        std::ofstream side(dir / "t.obj.json");
        side << R"({"concentration": [0.1, 0.2]})";
    }
    try {
        load_mesh(dir / "t.obj");
        FAIL() << "expected InvalidArgument";
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("concentration"), std::string::npos);
    }
}

TEST(MeshIoErrors, MissingAndCorruptFiles) {
    const auto dir = testing_util::scratch_dir("corrupt");
    EXPECT_THROW(load_mesh(dir / "nope.ply"), IoError);
    {
        std::ofstream f(dir / "bad.ply");
        f << "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\n";
    }
    EXPECT_THROW(load_mesh(dir / "bad.ply"), ParseError);
}

TEST(MeshIoErrors, OpenMeshFailsGenusCheck) {
    const auto dir = testing_util::scratch_dir("open");
    save_mesh(plane_grid(3), dir / "g.ply");
    EXPECT_THROW(load_mesh(dir / "g.ply"), TopologyError);
    LoadOptions o;
    o.require_genus_zero = false;
    EXPECT_NO_THROW(load_mesh(dir / "g.ply", std::nullopt, o));
}
