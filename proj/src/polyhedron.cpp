#include "tropgw/polyhedron.hpp"

#include <algorithm>
#include <sstream>

namespace tropgw {

namespace {

Rat dot(const RatVec& a, const RatVec& b) {
  Rat s = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += a(i) * b(i);
  return s;
}

RatVec normalize_dir(const RatVec& v) {
  IntVec p = primitive_scale(v);
  return to_rat(p);
}

struct DDRay {
  RatVec v;
  std::vector<bool> tight; // over processed inequality indices
};

} // namespace

ConeVRep dd_cone(const std::vector<RatVec>& ineqs_in, const std::vector<RatVec>& eqs, int dim) {
  std::vector<RatVec> ineqs;
  for (const auto& e : eqs) {
    if (e.isZero()) continue;
    ineqs.push_back(e);
    ineqs.push_back(-e);
  }
  for (const auto& a : ineqs_in)
    if (!a.isZero()) ineqs.push_back(a);

  std::vector<RatVec> lin;
  for (int i = 0; i < dim; ++i) {
    RatVec e = RatVec::Zero(dim);
    e(i) = 1;
    lin.push_back(e);
  }
  std::vector<DDRay> rays;
  const int total = static_cast<int>(ineqs.size());
  for (int t = 0; t < total; ++t) {
    const RatVec& a = ineqs[t];
    int pivot = -1;
    for (int i = 0; i < static_cast<int>(lin.size()); ++i)
      if (dot(a, lin[i]) != 0) {
        pivot = i;
        break;
      }
    if (pivot >= 0) {
      RatVec l0 = lin[pivot];
      Rat al0 = dot(a, l0);
      if (al0 < 0) {
        l0 = -l0;
        al0 = -al0;
      }
      std::vector<RatVec> newlin;
      for (int i = 0; i < static_cast<int>(lin.size()); ++i) {
        if (i == pivot) continue;
        Rat c = dot(a, lin[i]) / al0;
        newlin.push_back(lin[i] - c * l0);
      }
      lin = std::move(newlin);
      for (auto& r : rays) {
        Rat c = dot(a, r.v) / al0;
        r.v = normalize_dir(r.v - c * l0);
        r.tight.push_back(true);
      }
      DDRay nr;
      nr.v = normalize_dir(l0);
      nr.tight.assign(t, true);
      nr.tight.push_back(false);
      rays.push_back(std::move(nr));
      continue;
    }
    // lineality already inside the hyperplane: split rays
    std::vector<DDRay> pos, zero, neg;
    std::vector<Rat> sp, sn;
    for (auto& r : rays) {
      Rat s = dot(a, r.v);
      if (s > 0) {
        pos.push_back(std::move(r));
        sp.push_back(s);
      } else if (s == 0) {
        r.tight.push_back(true);
        zero.push_back(std::move(r));
      } else {
        neg.push_back(std::move(r));
        sn.push_back(s);
      }
    }
    const int linrank = static_cast<int>(lin.size());
    std::vector<DDRay> next = std::move(zero);
    for (auto& r : pos) {
      r.tight.push_back(false);
      next.push_back(r);
    }
    for (size_t ip = 0; ip < pos.size(); ++ip)
      for (size_t in = 0; in < neg.size(); ++in) {
        // adjacency: common tight constraints cut the minimal face down to
        // exactly lineality + 2
        std::vector<int> common;
        for (int j = 0; j < t; ++j)
          if (pos[ip].tight[j] && neg[in].tight[j]) common.push_back(j);
        if (static_cast<int>(common.size()) < dim - linrank - 2) continue;
        RatMat m(common.size(), dim);
        for (size_t j = 0; j < common.size(); ++j) m.row(j) = ineqs[common[j]].transpose();
        if (rank_of(m) != dim - linrank - 2) continue;
        DDRay w;
        w.v = normalize_dir(sp[ip] * neg[in].v - sn[in] * pos[ip].v);
        w.tight.resize(t + 1);
        for (int j = 0; j < t; ++j) w.tight[j] = pos[ip].tight[j] && neg[in].tight[j];
        w.tight[t] = true;
        next.push_back(std::move(w));
      }
    rays = std::move(next);
  }
  ConeVRep out;
  for (auto& r : rays) out.rays.push_back(std::move(r.v));
  for (auto& l : lin) out.lin.push_back(normalize_dir(l));
  return out;
}

ConeHRep cone_hrep(const std::vector<RatVec>& gens, const std::vector<RatVec>& lin, int dim) {
  ConeVRep dual = dd_cone(gens, lin, dim);
  ConeHRep out;
  out.ineqs = std::move(dual.rays);
  out.eqs = std::move(dual.lin);
  return out;
}

// ---------------------------------------------------------------------------

Polyhedron Polyhedron::empty(int ambient) {
  Polyhedron p;
  p.ambient_ = ambient;
  p.empty_ = true;
  p.vertices_ = RatMat(0, ambient);
  p.rays_ = RatMat(0, ambient);
  p.lineality_ = RatMat(0, ambient);
  return p;
}

Polyhedron Polyhedron::point(const RatVec& pt) {
  RatMat v(1, pt.size());
  v.row(0) = pt.transpose();
  return from_generators(static_cast<int>(pt.size()), v, RatMat(0, pt.size()),
                         RatMat(0, pt.size()));
}

Polyhedron Polyhedron::cone_from_rays(int ambient, const RatMat& rays, const RatMat& lineality) {
  RatMat v = RatMat::Zero(1, ambient);
  return from_generators(ambient, v, rays, lineality);
}

Polyhedron Polyhedron::full_space(int ambient) {
  return cone_from_rays(ambient, RatMat(0, ambient), RatMat(to_rat(IntMat(IntMat::Identity(ambient, ambient)))));
}

Polyhedron Polyhedron::from_generators(int ambient, RatMat vertices, RatMat rays,
                                       RatMat lineality) {
  if (vertices.rows() == 0) return empty(ambient);
  Polyhedron p;
  p.ambient_ = ambient;
  p.empty_ = false;
  p.vertices_ = std::move(vertices);
  p.rays_ = std::move(rays);
  p.lineality_ = std::move(lineality);
  p.canonicalize();
  return p;
}

Polyhedron Polyhedron::from_hrep(int ambient, const HRep& h) {
  std::vector<RatVec> ineqs, eqs;
  RatVec tpos = RatVec::Zero(ambient + 1);
  tpos(0) = 1;
  ineqs.push_back(tpos);
  for (const auto& [a, b] : h.ineqs) {
    RatVec v(ambient + 1);
    v(0) = -b;
    v.tail(ambient) = a;
    ineqs.push_back(v);
  }
  for (const auto& [c, d] : h.eqs) {
    RatVec v(ambient + 1);
    v(0) = -d;
    v.tail(ambient) = c;
    eqs.push_back(v);
  }
  ConeVRep vr = dd_cone(ineqs, eqs, ambient + 1);
  Polyhedron p;
  p.ambient_ = ambient;
  p.set_from_homog(vr); // DD output is already minimal
  p.canonical_order();
  return p;
}

// extract vertices/rays/lineality from the extreme rays of the homogenization
void Polyhedron::set_from_homog(const ConeVRep& vr) {
  const int m = ambient_;
  std::vector<RatVec> verts, rays, lin;
  for (const auto& r : vr.rays) {
    if (r(0) > 0)
      verts.push_back(r.tail(m) / r(0));
    else if (r(0) == 0)
      rays.push_back(r.tail(m));
    // r(0) < 0 cannot happen: the homogenization satisfies t >= 0
  }
  for (const auto& l : vr.lin) lin.push_back(l.tail(m));
  empty_ = verts.empty();
  vertices_ = RatMat(verts.size(), m);
  for (size_t i = 0; i < verts.size(); ++i) vertices_.row(i) = verts[i].transpose();
  rays_ = RatMat(empty_ ? 0 : rays.size(), m);
  lineality_ = RatMat(empty_ ? 0 : lin.size(), m);
  if (!empty_) {
    for (size_t i = 0; i < rays.size(); ++i) rays_.row(i) = rays[i].transpose();
    for (size_t i = 0; i < lin.size(); ++i) lineality_.row(i) = lin[i].transpose();
  }
}

void Polyhedron::canonicalize() {
  const int m = ambient_;
  // minimize through the homogenization cone: V -> H -> V
  std::vector<RatVec> gens, lin;
  for (int i = 0; i < vertices_.rows(); ++i) {
    RatVec g(m + 1);
    g(0) = 1;
    g.tail(m) = vertices_.row(i).transpose();
    gens.push_back(g);
  }
  for (int i = 0; i < rays_.rows(); ++i) {
    RatVec g = RatVec::Zero(m + 1);
    g.tail(m) = rays_.row(i).transpose();
    if (g.isZero()) continue;
    gens.push_back(g);
  }
  for (int i = 0; i < lineality_.rows(); ++i) {
    RatVec g = RatVec::Zero(m + 1);
    g.tail(m) = lineality_.row(i).transpose();
    if (g.isZero()) continue;
    lin.push_back(g);
  }
  ConeHRep h = cone_hrep(gens, lin, m + 1);
  ConeVRep vr = dd_cone(h.ineqs, h.eqs, m + 1);
  set_from_homog(vr);
  canonical_order();
}

void Polyhedron::canonical_order() {
  const int m = ambient_;
  cache_ = std::make_shared<Cache>();
  if (empty_) {
    vertices_ = RatMat(0, m);
    rays_ = RatMat(0, m);
    lineality_ = RatMat(0, m);
    return;
  }
  // canonical presentation: lineality as saturated Hermite basis, rays and
  // vertices reduced modulo lineality by orthogonal projection, sorted
  Sublattice linlat = saturated_lattice(m, lineality_);
  RatMat lb = to_rat(linlat.basis);
  auto project = [&](RatVec v) -> RatVec {
    if (lb.rows() == 0) return v;
    // v - L^T (L L^T)^{-1} L v with L = lb
    RatMat g = lb * lb.transpose();
    Eigen::FullPivLU<RatMat> lu(g);
    RatVec coef = lu.solve(lb * v);
    return v - lb.transpose() * coef;
  };
  std::vector<RatVec> verts, rays;
  for (int i = 0; i < vertices_.rows(); ++i) verts.push_back(project(vertices_.row(i).transpose()));
  for (int i = 0; i < rays_.rows(); ++i)
    rays.push_back(to_rat(primitive_scale(project(rays_.row(i).transpose()))));
  std::sort(verts.begin(), verts.end(), [](const RatVec& a, const RatVec& b) { return lex_less(a, b); });
  std::sort(rays.begin(), rays.end(), [](const RatVec& a, const RatVec& b) { return lex_less(a, b); });
  vertices_ = RatMat(verts.size(), m);
  for (size_t i = 0; i < verts.size(); ++i) vertices_.row(i) = verts[i].transpose();
  rays_ = RatMat(rays.size(), m);
  for (size_t i = 0; i < rays.size(); ++i) rays_.row(i) = rays[i].transpose();
  lineality_ = to_rat(linlat.basis);
}

int Polyhedron::dim() const {
  if (empty_) return -1;
  if (cache_->dim == -2) cache_->dim = rank_of(direction_span());
  return cache_->dim;
}

RatMat Polyhedron::direction_span() const {
  int n = static_cast<int>(rays_.rows() + lineality_.rows() + std::max<int>(0, vertices_.rows() - 1));
  RatMat s(n, ambient_);
  int k = 0;
  for (int i = 0; i < rays_.rows(); ++i) s.row(k++) = rays_.row(i);
  for (int i = 0; i < lineality_.rows(); ++i) s.row(k++) = lineality_.row(i);
  for (int i = 1; i < vertices_.rows(); ++i) s.row(k++) = vertices_.row(i) - vertices_.row(0);
  return s;
}

const Sublattice& Polyhedron::dir_lattice() const {
  if (!cache_->dirlat)
    cache_->dirlat = std::make_unique<Sublattice>(saturated_lattice(ambient_, direction_span()));
  return *cache_->dirlat;
}

const HRep& Polyhedron::hrep() const {
  if (cache_->hrep) return *cache_->hrep;
  auto h = std::make_unique<HRep>();
  if (!empty_) {
    std::vector<RatVec> gens, lin;
    for (int i = 0; i < vertices_.rows(); ++i) {
      RatVec g(ambient_ + 1);
      g(0) = 1;
      g.tail(ambient_) = vertices_.row(i).transpose();
      gens.push_back(g);
    }
    for (int i = 0; i < rays_.rows(); ++i) {
      RatVec g = RatVec::Zero(ambient_ + 1);
      g.tail(ambient_) = rays_.row(i).transpose();
      gens.push_back(g);
    }
    for (int i = 0; i < lineality_.rows(); ++i) {
      RatVec g = RatVec::Zero(ambient_ + 1);
      g.tail(ambient_) = lineality_.row(i).transpose();
      lin.push_back(g);
    }
    ConeHRep ch = cone_hrep(gens, lin, ambient_ + 1);
    for (const auto& a : ch.ineqs) {
      RatVec v = a.tail(ambient_);
      if (v.isZero()) continue; // the t >= 0 facet
      h->ineqs.push_back({v, -a(0)});
    }
    for (const auto& c : ch.eqs) {
      RatVec v = c.tail(ambient_);
      if (v.isZero()) continue;
      h->eqs.push_back({v, -c(0)});
    }
  } else {
    RatVec zero = RatVec::Zero(ambient_);
    h->eqs.push_back({zero, Rat(1)}); // 0 = 1: infeasible
  }
  cache_->hrep = std::move(h);
  return *cache_->hrep;
}

bool Polyhedron::contains(const RatVec& x) const {
  if (empty_) return false;
  const HRep& h = hrep();
  for (const auto& [a, b] : h.ineqs)
    if (dot(a, x) < b) return false;
  for (const auto& [c, d] : h.eqs)
    if (dot(c, x) != d) return false;
  return true;
}

RatVec Polyhedron::relint_point() const {
  if (empty_) throw std::logic_error("relint_point of empty polyhedron");
  RatVec p = RatVec::Zero(ambient_);
  for (int i = 0; i < vertices_.rows(); ++i) p += vertices_.row(i).transpose();
  p /= Rat(static_cast<long>(vertices_.rows()));
  for (int i = 0; i < rays_.rows(); ++i) p += rays_.row(i).transpose();
  return p;
}

bool Polyhedron::is_cone() const {
  return !empty_ && vertices_.rows() == 1 && vertices_.row(0).isZero();
}

Polyhedron Polyhedron::intersect(const Polyhedron& o) const {
  if (empty_ || o.empty_) return empty(ambient_);
  HRep h = hrep();
  const HRep& h2 = o.hrep();
  h.ineqs.insert(h.ineqs.end(), h2.ineqs.begin(), h2.ineqs.end());
  h.eqs.insert(h.eqs.end(), h2.eqs.begin(), h2.eqs.end());
  return from_hrep(ambient_, h);
}

Polyhedron Polyhedron::intersect_halfspace(const RatVec& a, const Rat& b) const {
  if (empty_) return *this;
  HRep h = hrep();
  h.ineqs.push_back({a, b});
  return from_hrep(ambient_, h);
}

Polyhedron Polyhedron::intersect_hyperplane(const RatVec& a, const Rat& b) const {
  if (empty_) return *this;
  HRep h = hrep();
  h.eqs.push_back({a, b});
  return from_hrep(ambient_, h);
}

Polyhedron Polyhedron::translate(const RatVec& v) const {
  if (empty_) return *this;
  RatMat nv = vertices_;
  for (int i = 0; i < nv.rows(); ++i) nv.row(i) += v.transpose();
  return from_generators(ambient_, nv, rays_, lineality_);
}

Polyhedron Polyhedron::product(const Polyhedron& o) const {
  int m = ambient_ + o.ambient_;
  if (empty_ || o.empty_) return empty(m);
  RatMat nv(vertices_.rows() * o.vertices_.rows(), m);
  int k = 0;
  for (int i = 0; i < vertices_.rows(); ++i)
    for (int j = 0; j < o.vertices_.rows(); ++j) {
      nv.row(k).head(ambient_) = vertices_.row(i);
      nv.row(k).tail(o.ambient_) = o.vertices_.row(j);
      ++k;
    }
  RatMat nr(rays_.rows() + o.rays_.rows(), m);
  nr.setZero();
  for (int i = 0; i < rays_.rows(); ++i) nr.row(i).head(ambient_) = rays_.row(i);
  for (int i = 0; i < o.rays_.rows(); ++i) nr.row(rays_.rows() + i).tail(o.ambient_) = o.rays_.row(i);
  RatMat nl(lineality_.rows() + o.lineality_.rows(), m);
  nl.setZero();
  for (int i = 0; i < lineality_.rows(); ++i) nl.row(i).head(ambient_) = lineality_.row(i);
  for (int i = 0; i < o.lineality_.rows(); ++i)
    nl.row(lineality_.rows() + i).tail(o.ambient_) = o.lineality_.row(i);
  return from_generators(m, nv, nr, nl);
}

Polyhedron Polyhedron::affine_image(const RatMat& A, const RatVec& t) const {
  int m = static_cast<int>(A.rows());
  if (empty_) return empty(m);
  RatMat nv(vertices_.rows(), m), nr(rays_.rows(), m), nl(lineality_.rows(), m);
  for (int i = 0; i < vertices_.rows(); ++i)
    nv.row(i) = (A * vertices_.row(i).transpose() + t).transpose();
  for (int i = 0; i < rays_.rows(); ++i) nr.row(i) = (A * rays_.row(i).transpose()).transpose();
  for (int i = 0; i < lineality_.rows(); ++i)
    nl.row(i) = (A * lineality_.row(i).transpose()).transpose();
  return from_generators(m, nv, nr, nl);
}

Polyhedron Polyhedron::recession_cone() const {
  if (empty_) return empty(ambient_);
  return cone_from_rays(ambient_, rays_, lineality_);
}

std::vector<Polyhedron> Polyhedron::facets() const {
  std::vector<Polyhedron> out;
  if (empty_) return out;
  const HRep& h = hrep();
  for (const auto& [a, b] : h.ineqs) {
    std::vector<RatVec> verts, rays;
    for (int i = 0; i < vertices_.rows(); ++i) {
      RatVec v = vertices_.row(i).transpose();
      if (dot(a, v) == b) verts.push_back(v);
    }
    for (int i = 0; i < rays_.rows(); ++i) {
      RatVec r = rays_.row(i).transpose();
      if (dot(a, r) == 0) rays.push_back(r);
    }
    if (verts.empty()) continue;
    RatMat vm(verts.size(), ambient_), rm(rays.size(), ambient_);
    for (size_t i = 0; i < verts.size(); ++i) vm.row(i) = verts[i].transpose();
    for (size_t i = 0; i < rays.size(); ++i) rm.row(i) = rays[i].transpose();
    out.push_back(from_generators(ambient_, vm, rm, lineality_));
  }
  return out;
}

const std::string& Polyhedron::key() const {
  if (cache_->key) return *cache_->key;
  std::ostringstream os;
  os << ambient_ << (empty_ ? "E" : "P");
  auto emit = [&os](const RatMat& m, char tag) {
    os << tag << m.rows() << ":";
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) os << rat_to_string(m(i, j)) << ",";
  };
  emit(vertices_, 'v');
  emit(rays_, 'r');
  emit(lineality_, 'l');
  cache_->key = std::make_unique<std::string>(os.str());
  return *cache_->key;
}

} // namespace tropgw
