#include "rage/serialize.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rage {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

namespace {

class LineReader {
public:
    explicit LineReader(std::istream& is) : is_(is) {}

    // Next non-empty, non-comment line.
    std::string next() {
        std::string line;
        while (std::getline(is_, line)) {
            ++line_no_;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') {
                continue;
            }
            return line.substr(first);
        }
        fail("unexpected end of input");
        return {};
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::runtime_error("parse error at line " + std::to_string(line_no_) + ": " + msg);
    }

    int line_no() const { return line_no_; }

private:
    std::istream& is_;
    int line_no_ = 0;
};

void expect_token(LineReader& r, std::istringstream& ss, const std::string& expected) {
    std::string tok;
    ss >> tok;
    if (tok != expected) {
        r.fail("expected '" + expected + "', got '" + tok + "'");
    }
}

std::istringstream expect_line(LineReader& r, const std::string& keyword) {
    std::istringstream ss(r.next());
    expect_token(r, ss, keyword);
    return ss;
}

void read_header(LineReader& r, const std::string& kind) {
    std::istringstream magic(r.next());
    std::string tag;
    int version = 0;
    magic >> tag >> version;
    if (tag != "%RAGE-TNS" || version != 1) {
        r.fail("bad magic header");
    }
    std::istringstream obj = expect_line(r, "object");
    std::string got;
    obj >> got;
    if (got != kind) {
        r.fail("expected object '" + kind + "', got '" + got + "'");
    }
}

void write_header(std::ostream& os, const std::string& kind) {
    os << "%RAGE-TNS 1\n";
    os << "object " << kind << "\n";
}

void write_entries(std::ostream& os, const DenseTensor& t) {
    for (const auto& v : t.data()) {
        os << format_double(v.real()) << " " << format_double(v.imag()) << "\n";
    }
}

DenseTensor read_entries(LineReader& r, const std::vector<std::size_t>& shape) {
    DenseTensor t(shape);
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::istringstream ss(r.next());
        double re = 0.0, im = 0.0;
        if (!(ss >> re >> im)) {
            r.fail("expected a complex entry");
        }
        t[i] = Complex(re, im);
    }
    return t;
}

void write_tensor_block(std::ostream& os, const std::string& label, const DenseTensor& t) {
    os << label << " shape";
    for (std::size_t d : t.shape()) {
        os << " " << d;
    }
    os << "\n";
    write_entries(os, t);
}

}  // namespace

void write_mps(std::ostream& os, const MpsState& m) {
    write_header(os, "mps");
    os << "boundary " << (m.boundary() == Boundary::open ? "open" : "closed") << "\n";
    os << "n_sites " << m.n_sites() << "\n";
    os << "local_dim " << m.local_dim() << "\n";
    for (int i = 0; i < m.n_sites(); ++i) {
        write_tensor_block(os, "tensor " + std::to_string(i), m.site(i));
    }
    os << "end\n";
}

MpsState read_mps(std::istream& is) {
    LineReader r(is);
    read_header(r, "mps");
    std::string boundary_word;
    expect_line(r, "boundary") >> boundary_word;
    int n = 0, q = 0;
    expect_line(r, "n_sites") >> n;
    expect_line(r, "local_dim") >> q;
    if (n < 1 || q < 2) {
        r.fail("invalid sizes");
    }
    std::vector<DenseTensor> sites;
    for (int i = 0; i < n; ++i) {
        std::istringstream ss = expect_line(r, "tensor");
        int idx = -1;
        ss >> idx;
        if (idx != i) {
            r.fail("tensors must appear in order");
        }
        expect_token(r, ss, "shape");
        std::vector<std::size_t> shape;
        std::size_t d = 0;
        while (ss >> d) {
            shape.push_back(d);
        }
        if (shape.size() != 3) {
            r.fail("MPS tensors are rank 3");
        }
        sites.push_back(read_entries(r, shape));
    }
    expect_line(r, "end");
    return MpsState(boundary_word == "open" ? Boundary::open : Boundary::closed, q,
                    std::move(sites));
}

void write_tts(std::ostream& os, const TtsState& t) {
    const TreeTopology& topo = t.topology();
    write_header(os, "tts");
    os << "n_sites " << topo.n_sites << "\n";
    os << "local_dim " << t.local_dim() << "\n";
    os << "vertices " << topo.n_vertices << "\n";
    os << "root " << topo.root << "\n";
    os << "leaf_sites";
    for (int v = 0; v < topo.n_vertices; ++v) {
        os << " " << topo.leaf_site[v];
    }
    os << "\n";
    os << "edges " << topo.edges.size() << "\n";
    for (const auto& e : topo.edges) {
        os << "edge " << e.a << " " << e.b << " " << e.dim << "\n";
    }
    for (int v : topo.internal_vertices()) {
        write_tensor_block(os, "tensor " + std::to_string(v), t.tensor(v));
    }
    os << "end\n";
}

TtsState read_tts(std::istream& is) {
    LineReader r(is);
    read_header(r, "tts");
    TreeTopology topo;
    int q = 0;
    expect_line(r, "n_sites") >> topo.n_sites;
    expect_line(r, "local_dim") >> q;
    expect_line(r, "vertices") >> topo.n_vertices;
    expect_line(r, "root") >> topo.root;
    {
        std::istringstream ss = expect_line(r, "leaf_sites");
        int v = 0;
        while (ss >> v) {
            topo.leaf_site.push_back(v);
        }
        if (static_cast<int>(topo.leaf_site.size()) != topo.n_vertices) {
            r.fail("leaf_sites length mismatch");
        }
    }
    std::size_t n_edges = 0;
    expect_line(r, "edges") >> n_edges;
    topo.incident.assign(topo.n_vertices, {});
    for (std::size_t i = 0; i < n_edges; ++i) {
        std::istringstream ss = expect_line(r, "edge");
        TreeTopology::Edge e;
        ss >> e.a >> e.b >> e.dim;
        const int id = static_cast<int>(topo.edges.size());
        topo.edges.push_back(e);
        topo.incident[e.a].push_back(id);
        topo.incident[e.b].push_back(id);
    }
    std::map<int, DenseTensor> tensors;
    for (int count = 0; count < topo.n_vertices; ++count) {
        if (topo.leaf_site[count] >= 0) {
            continue;
        }
        std::istringstream ss = expect_line(r, "tensor");
        int v = -1;
        ss >> v;
        expect_token(r, ss, "shape");
        std::vector<std::size_t> shape;
        std::size_t d = 0;
        while (ss >> d) {
            shape.push_back(d);
        }
        tensors.emplace(v, read_entries(r, shape));
    }
    expect_line(r, "end");
    return TtsState(std::move(topo), q, std::move(tensors));
}

void write_phases(std::ostream& os, const AdjacencyPhases& p) {
    write_header(os, "phases");
    os << "n_sites " << p.n_sites() << "\n";
    os << "local_dim " << p.local_dim() << "\n";
    const auto pairs = p.nonzero_pairs();
    os << "pairs " << pairs.size() << "\n";
    for (const auto& [a, b] : pairs) {
        os << "pair " << a << " " << b << "\n";
        const Eigen::MatrixXd m = p.pair_matrix(a, b);
        for (int s = 0; s < p.local_dim(); ++s) {
            for (int t = 0; t < p.local_dim(); ++t) {
                os << format_double(m(s, t)) << "\n";
            }
        }
    }
    os << "end\n";
}

AdjacencyPhases read_phases(std::istream& is) {
    LineReader r(is);
    read_header(r, "phases");
    int n = 0, q = 0;
    expect_line(r, "n_sites") >> n;
    expect_line(r, "local_dim") >> q;
    AdjacencyPhases p(n, q);
    std::size_t n_pairs = 0;
    expect_line(r, "pairs") >> n_pairs;
    for (std::size_t i = 0; i < n_pairs; ++i) {
        int a = -1, b = -1;
        expect_line(r, "pair") >> a >> b;
        Eigen::MatrixXd m(q, q);
        for (int s = 0; s < q; ++s) {
            for (int t = 0; t < q; ++t) {
                std::istringstream ss(r.next());
                if (!(ss >> m(s, t))) {
                    r.fail("expected a phase entry");
                }
            }
        }
        p.set_pair_matrix(a, b, m);
    }
    expect_line(r, "end");
    return p;
}

void write_rotations(std::ostream& os, const LocalRotations& rot) {
    write_header(os, "rotations");
    os << "n_sites " << rot.n_sites() << "\n";
    for (int i = 0; i < rot.n_sites(); ++i) {
        const Eigen::Vector4d x = rot.parameters(i);
        os << "site " << i;
        for (int k = 0; k < 4; ++k) {
            os << " " << format_double(x(k));
        }
        os << "\n";
    }
    os << "end\n";
}

LocalRotations read_rotations(std::istream& is) {
    LineReader r(is);
    read_header(r, "rotations");
    int n = 0;
    expect_line(r, "n_sites") >> n;
    LocalRotations rot(n);
    for (int i = 0; i < n; ++i) {
        std::istringstream ss = expect_line(r, "site");
        int idx = -1;
        Eigen::Vector4d x;
        ss >> idx >> x(0) >> x(1) >> x(2) >> x(3);
        if (idx != i) {
            r.fail("rotation sites must appear in order");
        }
        rot.set_parameters(i, x);
    }
    expect_line(r, "end");
    return rot;
}

void write_rage(std::ostream& os, const RageState& r) {
    write_header(os, "rage");
    os << "backbone " << (r.has_mps() ? "mps" : "tts") << "\n";
    if (r.has_mps()) {
        write_mps(os, r.mps());
    } else {
        write_tts(os, r.tts());
    }
    write_phases(os, r.phases);
    write_rotations(os, r.rotations);
    os << "end\n";
}

RageState read_rage(std::istream& is) {
    LineReader r(is);
    read_header(r, "rage");
    std::string backbone_kind;
    expect_line(r, "backbone") >> backbone_kind;
    if (backbone_kind == "mps") {
        MpsState m = read_mps(is);
        AdjacencyPhases p = read_phases(is);
        LocalRotations v = read_rotations(is);
        LineReader tail(is);
        expect_line(tail, "end");
        return RageState(std::move(m), std::move(p), std::move(v));
    }
    TtsState t = read_tts(is);
    AdjacencyPhases p = read_phases(is);
    LocalRotations v = read_rotations(is);
    LineReader tail(is);
    expect_line(tail, "end");
    return RageState(std::move(t), std::move(p), std::move(v));
}

void write_circuit(std::ostream& os, const Circuit& c) {
    write_header(os, "circuit");
    os << "n_sites " << c.n_sites << "\n";
    os << "seed " << c.seed << "\n";
    os << "n_blocks " << c.n_blocks << "\n";
    os << "gates " << c.gates.size() << "\n";
    for (const auto& g : c.gates) {
        if (g.kind == Gate::Kind::controlled_phase) {
            os << "gate cphase " << g.site_a << " " << g.site_b << " " << format_double(g.angle)
               << "\n";
        } else {
            os << "gate single " << g.site_a;
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    os << " " << format_double(g.matrix(i, j).real()) << " "
                       << format_double(g.matrix(i, j).imag());
                }
            }
            os << "\n";
        }
    }
    os << "end\n";
}

Circuit read_circuit(std::istream& is) {
    LineReader r(is);
    read_header(r, "circuit");
    Circuit c;
    expect_line(r, "n_sites") >> c.n_sites;
    expect_line(r, "seed") >> c.seed;
    expect_line(r, "n_blocks") >> c.n_blocks;
    std::size_t n_gates = 0;
    expect_line(r, "gates") >> n_gates;
    for (std::size_t i = 0; i < n_gates; ++i) {
        std::istringstream ss = expect_line(r, "gate");
        std::string kind;
        ss >> kind;
        if (kind == "cphase") {
            int a = 0, b = 0;
            double angle = 0.0;
            ss >> a >> b >> angle;
            c.gates.push_back(Gate::controlled(a, b, angle));
        } else if (kind == "single") {
            int site = 0;
            ss >> site;
            Eigen::Matrix2cd u;
            for (int row = 0; row < 2; ++row) {
                for (int col = 0; col < 2; ++col) {
                    double re = 0.0, im = 0.0;
                    ss >> re >> im;
                    u(row, col) = Complex(re, im);
                }
            }
            c.gates.push_back(Gate::single(site, u));
        } else {
            r.fail("unknown gate kind '" + kind + "'");
        }
    }
    expect_line(r, "end");
    return c;
}

void write_hamiltonian(std::ostream& os, const HamiltonianSum& h) {
    write_header(os, "hamiltonian");
    os << "n_sites " << h.n_sites << "\n";
    os << "lattice " << h.lattice.lx << " " << h.lattice.ly << " " << (h.lattice.periodic ? 1 : 0)
       << "\n";
    os << "terms " << h.terms.size() << "\n";
    for (const auto& t : h.terms) {
        os << "term " << t.letters << " " << format_double(t.coefficient.real()) << " "
           << format_double(t.coefficient.imag()) << "\n";
    }
    os << "end\n";
}

HamiltonianSum read_hamiltonian(std::istream& is) {
    LineReader r(is);
    read_header(r, "hamiltonian");
    HamiltonianSum h;
    expect_line(r, "n_sites") >> h.n_sites;
    int periodic = 0;
    expect_line(r, "lattice") >> h.lattice.lx >> h.lattice.ly >> periodic;
    h.lattice.periodic = periodic != 0;
    std::size_t n_terms = 0;
    expect_line(r, "terms") >> n_terms;
    for (std::size_t i = 0; i < n_terms; ++i) {
        std::istringstream ss = expect_line(r, "term");
        std::string letters;
        double re = 0.0, im = 0.0;
        ss >> letters >> re >> im;
        h.add(letters, Complex(re, im));
    }
    expect_line(r, "end");
    return h;
}

void write_peps(std::ostream& os, const PepsState& p) {
    write_header(os, "peps");
    os << "lx " << p.lx() << "\n";
    os << "ly " << p.ly() << "\n";
    os << "local_dim " << p.local_dim() << "\n";
    for (int y = 0; y < p.ly(); ++y) {
        for (int x = 0; x < p.lx(); ++x) {
            write_tensor_block(os, "tensor " + std::to_string(x) + " " + std::to_string(y),
                               p.tensor(x, y));
        }
    }
    os << "end\n";
}

PepsState read_peps(std::istream& is) {
    LineReader r(is);
    read_header(r, "peps");
    int lx = 0, ly = 0, q = 0;
    expect_line(r, "lx") >> lx;
    expect_line(r, "ly") >> ly;
    expect_line(r, "local_dim") >> q;
    std::vector<DenseTensor> tensors;
    for (int y = 0; y < ly; ++y) {
        for (int x = 0; x < lx; ++x) {
            std::istringstream ss = expect_line(r, "tensor");
            int gx = -1, gy = -1;
            ss >> gx >> gy;
            if (gx != x || gy != y) {
                r.fail("tensors must appear in raster order");
            }
            expect_token(r, ss, "shape");
            std::vector<std::size_t> shape;
            std::size_t d = 0;
            while (ss >> d) {
                shape.push_back(d);
            }
            if (shape.size() != 5) {
                r.fail("PEPS tensors are rank 5");
            }
            tensors.push_back(read_entries(r, shape));
        }
    }
    expect_line(r, "end");
    return PepsState(lx, ly, q, std::move(tensors));
}

}  // namespace rage
