#pragma once

#include <ostream>
#include <vector>

namespace ffem {

// Domain is fixed to Omega = (-1,1)^2 with a horizontal fault along y=0.
// eps = 0 is the sharp interface; eps > 0 is the strip (-1,1)x(-eps/2,eps/2).
struct FaultGeometry {
    double eps = 0.0;
    bool valid() const { return eps >= 0.0 && eps < 0.5; }
};

enum class Region { Bulk, Fault };

struct ElemRow {
    double y0;
    double y1;
    Region tag;
};

// Structured Q2 mesh: 2n columns of width 1/n; element rows stacked bottom to
// top.  For eps > 0 the strip is covered by n Fault rows of height eps/n and
// each bulk band by round(n*(1-eps/2)) uniform rows.  For eps = 0 the line
// y=0 is a mesh line and u1 nodes there are duplicated (handled by DofMap).
struct StructuredMesh {
    int n = 0;
    double eps = 0.0;
    std::vector<double> xs;      // x node coordinates, 4n+1 entries
    std::vector<ElemRow> rows;   // element rows
    std::vector<double> ynodes;  // y node coordinates, 2*rows+1 entries
    int interface_node_row = -1; // eps==0: node-row index of y=0, else -1
    int interface_elem_row = -1; // eps==0: first element row above y=0

    bool sharp() const { return eps == 0.0; }
    int ncols() const { return 2 * n; }
    int nrows() const { return static_cast<int>(rows.size()); }
    int nxn() const { return static_cast<int>(xs.size()); }
    int nyn() const { return static_cast<int>(ynodes.size()); }
};

StructuredMesh build_mesh(int n, FaultGeometry geom);

// Debug dump: node list then element list with region tags.
void write_mesh_csv(const StructuredMesh& mesh, std::ostream& out);

// Global DOF numbering.  Layout:
//   [0, ngrid)                u1 at grid nodes
//   [ngrid, ngrid+nxn)        duplicated minus-side u1 on y=0 (sharp mesh only)
//   [u2_offset, u2_offset+ngrid)  u2 at grid nodes
//   [gamma_offset, gamma_offset+ngamma)  slip DOFs (1D quadratic on (-1,1))
struct DofMap {
    int nxn = 0;
    int nyn = 0;
    int ngrid = 0;
    bool sharp = false;
    bool with_gamma = false;
    int interface_node_row = -1;
    int u2_offset = 0;
    int gamma_offset = 0;
    int ngamma = 0;
    int ndof = 0;
    std::vector<char> dirichlet; // 1 if the DOF is constrained (rows y=+-1)

    // below=true selects the minus-side duplicate on the interface node row.
    int u1(int ix, int iy, bool below) const {
        if (sharp && iy == interface_node_row && below) return ngrid + ix;
        return iy * nxn + ix;
    }
    int u2(int ix, int iy) const { return u2_offset + iy * nxn + ix; }
    int gdof(int k) const { return gamma_offset + k; }
    int free_count() const;
};

DofMap build_dof_map(const StructuredMesh& mesh, bool with_gamma);

// Paired plus/minus u1 trace DOFs along the sharp interface, ordered by x.
struct InterfacePairs {
    std::vector<int> plus;
    std::vector<int> minus;
    std::vector<double> x;
};

InterfacePairs interface_trace_dofs(const StructuredMesh& mesh, const DofMap& dofs);

} // namespace ffem
