#include "bistab/output.hpp"

#include "bistab/config.hpp"
#include "bistab/observables.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace bistab {

namespace {

void header(std::ostream& out, const std::vector<std::string>& cols)
{
    for (std::size_t i = 0; i < cols.size(); ++i)
        out << (i ? "," : "") << cols[i];
    out << '\n';
}

class Row {
public:
    explicit Row(std::ostream& out) : out_(out) {}
    ~Row() { out_ << '\n'; }
    Row& operator<<(double v)
    {
        sep();
        out_ << format_double(v);
        return *this;
    }
    Row& operator<<(int v)
    {
        sep();
        out_ << v;
        return *this;
    }

private:
    void sep()
    {
        if (!first_)
            out_ << ',';
        first_ = false;
    }
    std::ostream& out_;
    bool first_ = true;
};

void solution_columns(Row& row, const SteadyState& ss, const SystemParams& p)
{
    const ObservableRecord o = observe(ss, p);
    const MeanFieldState& s = ss.state;
    row << o.T1 << o.T2 << s.ng1 << s.ng2 << s.ne1 << s.ne2 << ss.x1 << ss.x2 << s.alpha1.real() << s.alpha1.imag()
        << s.alpha2.real() << s.alpha2.imag() << ss.residual_norm;
}

void arc_rows(std::ostream& out, const ArcSweep& arc, const double* N)
{
    for (std::size_t k = 0; k < arc.points.size(); ++k) {
        const ArcPoint& pt = arc.points[k];
        for (std::size_t b = 0; b < pt.set.size(); ++b) {
            const SteadyState& ss = pt.set.solutions[b];
            Row row(out);
            if (N)
                row << *N;
            row << pt.phi << pt.eta1 << pt.eta2 << arc.branch_of[k][b] << int(ss.stable);
            solution_columns(row, ss, pt.set.params);
        }
    }
}

} // namespace

const std::vector<std::string>& arc_columns()
{
    static const std::vector<std::string> c = {"phi_rad", "eta1",   "eta2",      "branch_id", "stable",    "T1",
                                               "T2",      "ng1",    "ng2",       "ne1",       "ne2",       "x1",
                                               "x2",      "re_alpha1", "im_alpha1", "re_alpha2", "im_alpha2", "residual"};
    return c;
}

const std::vector<std::string>& scan_columns()
{
    static const std::vector<std::string> c = [] {
        std::vector<std::string> v{"N"};
        v.insert(v.end(), arc_columns().begin(), arc_columns().end());
        return v;
    }();
    return c;
}

const std::vector<std::string>& grid_columns()
{
    static const std::vector<std::string> c = {"eta1", "eta2", "n_total", "n_stable", "marginal"};
    return c;
}

const std::vector<std::string>& steady_columns()
{
    static const std::vector<std::string> c = {
        "solution", "stable", "marginal", "spectrum_max_real", "eta1", "eta2", "T1", "T2", "ng1", "ng2", "ne1",
        "ne2", "x1", "x2", "re_alpha1", "im_alpha1", "re_alpha2", "im_alpha2", "residual"};
    return c;
}

const std::vector<std::string>& trajectory_columns()
{
    static const std::vector<std::string> c = {"t",      "re_alpha1", "im_alpha1", "re_alpha2", "im_alpha2",
                                               "re_m1",  "im_m1",     "re_m2",     "im_m2",     "ne1",
                                               "ng1",    "ne2",       "ng2"};
    return c;
}

void write_arc_csv(std::ostream& out, const ArcSweep& arc)
{
    header(out, arc_columns());
    arc_rows(out, arc, nullptr);
}

void write_scan_csv(std::ostream& out, const std::vector<ArcSweep>& scan, const std::vector<double>& N_list)
{
    if (scan.size() != N_list.size())
        throw std::invalid_argument("scan and atom-number list differ in length");
    header(out, scan_columns());
    for (std::size_t i = 0; i < scan.size(); ++i)
        arc_rows(out, scan[i], &N_list[i]);
}

void write_hysteresis_csv(std::ostream& out, const HysteresisResult& r)
{
    header(out, arc_columns());
    int direction = 0;
    for (const auto* records : {&r.forward, &r.backward}) {
        for (const SweepRecord& rec : *records) {
            Row row(out);
            row << rec.control << rec.eta1 << rec.eta2 << direction << int(rec.converged && rec.steady.stable);
            const ObservableRecord& o = rec.observables;
            const MeanFieldState& s = rec.steady.state;
            row << o.T1 << o.T2 << s.ng1 << s.ng2 << s.ne1 << s.ne2 << rec.steady.x1 << rec.steady.x2
                << s.alpha1.real() << s.alpha1.imag() << s.alpha2.real() << s.alpha2.imag()
                << rec.steady.residual_norm;
        }
        ++direction;
    }
}

void write_grid_csv(std::ostream& out, const PhaseDiagram& pd)
{
    header(out, grid_columns());
    for (std::size_t i = 0; i < pd.eta1_axis.size(); ++i) {
        for (std::size_t j = 0; j < pd.eta2_axis.size(); ++j) {
            const std::size_t k = pd.index(i, j);
            if (pd.status[k] == NodeStatus::degenerate)
                continue;
            Row row(out);
            row << pd.eta1_axis[i] << pd.eta2_axis[j] << pd.total_counts[k] << pd.counts[k]
                << int(pd.marginal_mask[k]);
        }
    }
}

void write_steady_csv(std::ostream& out, const SolutionSet& set)
{
    header(out, steady_columns());
    for (std::size_t b = 0; b < set.size(); ++b) {
        const SteadyState& ss = set.solutions[b];
        Row row(out);
        row << int(b) << int(ss.stable) << int(ss.marginal) << ss.spectrum_max_real << set.params.eta1
            << set.params.eta2;
        solution_columns(row, ss, set.params);
    }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& tr)
{
    header(out, trajectory_columns());
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const MeanFieldState& s = tr.states[i];
        Row row(out);
        row << tr.times[i] << s.alpha1.real() << s.alpha1.imag() << s.alpha2.real() << s.alpha2.imag()
            << s.m1.real() << s.m1.imag() << s.m2.real() << s.m2.imag() << s.ne1 << s.ng1 << s.ne2 << s.ng2;
    }
}

std::string sha256_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot read '" + path + "'");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("sha256 initialisation failed");
    }
    char buf[1 << 16];
    while (f) {
        f.read(buf, sizeof buf);
        if (f.gcount() > 0)
            EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(f.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);

    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i)
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return hex.str();
}

} // namespace bistab
