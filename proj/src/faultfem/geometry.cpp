#include "faultfem/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ffem {

StructuredMesh build_mesh(int n, FaultGeometry geom) {
    if (n < 2) throw std::invalid_argument("build_mesh: n must be >= 2");
    if (!geom.valid()) throw std::invalid_argument("build_mesh: invalid fault geometry");

    StructuredMesh mesh;
    mesh.n = n;
    mesh.eps = geom.eps;

    const int nxn = 4 * n + 1;
    mesh.xs.resize(nxn);
    for (int i = 0; i < nxn; ++i) mesh.xs[i] = -1.0 + 2.0 * i / (nxn - 1);
    mesh.xs.front() = -1.0;
    mesh.xs.back() = 1.0;

    if (geom.eps == 0.0) {
        for (int k = 0; k < 2 * n; ++k) {
            double y0 = -1.0 + static_cast<double>(k) / n;
            double y1 = -1.0 + static_cast<double>(k + 1) / n;
            mesh.rows.push_back({y0, y1, Region::Bulk});
        }
        mesh.rows[n - 1].y1 = 0.0;
        mesh.rows[n].y0 = 0.0;
        mesh.interface_node_row = 2 * n;
        mesh.interface_elem_row = n;
    } else {
        const double eps = geom.eps;
        const int m = static_cast<int>(std::lround(n * (1.0 - eps / 2.0)));
        if (m < 1) throw std::invalid_argument("build_mesh: n too small for bulk bands");
        for (int k = 0; k < m; ++k) {
            double y0 = -1.0 + (1.0 - eps / 2.0) * k / m;
            double y1 = -1.0 + (1.0 - eps / 2.0) * (k + 1) / m;
            mesh.rows.push_back({y0, y1, Region::Bulk});
        }
        mesh.rows.back().y1 = -eps / 2.0;
        for (int k = 0; k < n; ++k) {
            double y0 = -eps / 2.0 + eps * k / n;
            double y1 = -eps / 2.0 + eps * (k + 1) / n;
            mesh.rows.push_back({y0, y1, Region::Fault});
        }
        mesh.rows.back().y1 = eps / 2.0;
        for (int k = 0; k < m; ++k) {
            double y0 = eps / 2.0 + (1.0 - eps / 2.0) * k / m;
            double y1 = eps / 2.0 + (1.0 - eps / 2.0) * (k + 1) / m;
            mesh.rows.push_back({y0, y1, Region::Bulk});
        }
        mesh.rows.back().y1 = 1.0;
    }

    const int nrows = mesh.nrows();
    mesh.ynodes.resize(2 * nrows + 1);
    for (int r = 0; r < nrows; ++r) {
        mesh.ynodes[2 * r] = mesh.rows[r].y0;
        mesh.ynodes[2 * r + 1] = 0.5 * (mesh.rows[r].y0 + mesh.rows[r].y1);
    }
    mesh.ynodes[2 * nrows] = mesh.rows.back().y1;
    return mesh;
}

void write_mesh_csv(const StructuredMesh& mesh, std::ostream& out) {
    out << "kind,id,x_or_node0,y_or_node1,node2,node3,node4,node5,node6,node7,node8,region\n";
    char buf[64];
    int nid = 0;
    for (int iy = 0; iy < mesh.nyn(); ++iy) {
        for (int ix = 0; ix < mesh.nxn(); ++ix) {
            std::snprintf(buf, sizeof(buf), "node,%d,%.6e,%.6e,,,,,,,,\n", nid++,
                          mesh.xs[ix], mesh.ynodes[iy]);
            out << buf;
        }
    }
    int eid = 0;
    for (int ey = 0; ey < mesh.nrows(); ++ey) {
        for (int ex = 0; ex < mesh.ncols(); ++ex) {
            out << "elem," << eid++;
            for (int j = 0; j < 3; ++j)
                for (int i = 0; i < 3; ++i)
                    out << ',' << ((2 * ey + j) * mesh.nxn() + (2 * ex + i));
            out << ',' << (mesh.rows[ey].tag == Region::Fault ? "FAULT" : "BULK")
                << '\n';
        }
    }
}

DofMap build_dof_map(const StructuredMesh& mesh, bool with_gamma) {
    DofMap d;
    d.nxn = mesh.nxn();
    d.nyn = mesh.nyn();
    d.ngrid = d.nxn * d.nyn;
    d.sharp = mesh.sharp();
    d.with_gamma = with_gamma;
    d.interface_node_row = mesh.interface_node_row;
    const int ndup = d.sharp ? d.nxn : 0;
    d.u2_offset = d.ngrid + ndup;
    d.gamma_offset = d.u2_offset + d.ngrid;
    d.ngamma = with_gamma ? d.nxn : 0;
    d.ndof = d.gamma_offset + d.ngamma;

    d.dirichlet.assign(d.ndof, 0);
    for (int ix = 0; ix < d.nxn; ++ix) {
        d.dirichlet[d.u1(ix, 0, false)] = 1;
        d.dirichlet[d.u2(ix, 0)] = 1;
        d.dirichlet[d.u1(ix, d.nyn - 1, false)] = 1;
        d.dirichlet[d.u2(ix, d.nyn - 1)] = 1;
    }
    return d;
}

int DofMap::free_count() const {
    int c = 0;
    for (char f : dirichlet)
        if (!f) ++c;
    return c;
}

InterfacePairs interface_trace_dofs(const StructuredMesh& mesh, const DofMap& dofs) {
    if (!mesh.sharp())
        throw std::logic_error("interface_trace_dofs: requires a sharp-interface mesh");
    InterfacePairs p;
    for (int ix = 0; ix < dofs.nxn; ++ix) {
        p.plus.push_back(dofs.u1(ix, dofs.interface_node_row, false));
        p.minus.push_back(dofs.u1(ix, dofs.interface_node_row, true));
        p.x.push_back(mesh.xs[ix]);
    }
    return p;
}

} // namespace ffem
