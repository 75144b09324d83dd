// Reference values computed offline with mpmath at 40 significant digits.
#pragma once
#include <array>
#include <utility>
#include <vector>

#include "fhdet/core.hpp"

namespace fhdet::ref {
// {z, log_gamma(z)}
const std::vector<std::pair<cplx,cplx>> kLogGamma = {{{1.5, 0},{-0.12078223763524522, 0}},{{0.29999999999999999, 0.69999999999999996},{-0.093170312498134178, -1.2239573657136886}},{{-2.5, 0.10000000000000001},{-0.10314924404281921, -9.3144442683598374}},{{-7.2999999999999998, -3},{-16.159873277458498, 18.269370323941644}},{{20, 40},{10.742622165868498, 133.60578251560722}},{{0.001, 0.01},{4.5995365029987259, -1.4768829940370916}},{{100.5, 0},{361.43554046777763, 0}},{{-0.5, -50},{-81.532950809468474, -144.02118763070598}},{{3, -200},{-299.99447091206065, -863.57504783456011}}};
const std::vector<std::pair<cplx,cplx>> kDigamma = {{{1.5, 0},{0.03648997397857652, 0}},{{0.29999999999999999, 0.69999999999999996},{-0.44720792029956119, 1.8918108552185267}},{{-2.5, 0.10000000000000001},{1.1036973777788084, 0.92269929145859886}},{{-7.2999999999999998, -3},{2.1235461742282471, -2.7748171137391822}},{{20, 40},{3.7954762291872433, 1.1171820531275982}},{{0.25, -0.10000000000000001},{-3.669125381095673, -1.4985822622590681}},{{-0.5, -50},{3.9122063175965662, -1.5907943269948766}}};
const std::vector<std::pair<cplx,cplx>> kBarnesG = {{{0.5, 0},{0.60324428120944618, 0}},{{1.3, 0.40000000000000002},{1.1398127105020308, 0.0085671448561677275}},{{2.7000000000000002, -1.1000000000000001},{0.66725838434785556, 0.026340525947724031}},{{-1.5, 0.5},{-0.61081455954919373, -0.1881888977444082}},{{0.80000000000000004, 0.050000000000000003},{0.88862967318798958, 0.035994007548811532}},{{5, 3},{0.019007568204352579, -0.00027233721946170564}},{{1.2, -6},{-0.00072078660984740202, 6.042455077054405e-05}},{{12.5, 0.5},{-1.7800211071816818e+31, 1.4313347094157014e+31}}};
// {a, c, z, Phi}
const std::vector<std::array<cplx,4>> kKummer = {{{{0.29999999999999999, 0},{1.2, 0},{2.5, 0},{2.5836272832809981, 0}}},{{{0.29999999999999999, 0.20000000000000001},{1.7, -0.10000000000000001},{-12, 3},{0.42040447786921831, -0.21242691397626845}}},{{{-0.20000000000000001, 0.10000000000000001},{0.59999999999999998, 0},{0, 17},{1.5204737167231701, -1.2523732223848862}}},{{{0.14999999999999999, -0.050000000000000003},{0.69999999999999996, 0.10000000000000001},{35, -20},{-12416941066839.541, -40196212707024.602}}},{{{1.1000000000000001, 0},{2.2999999999999998, 0},{-45, 2},{0.019158289295142732, 0.00093240516568240809}}},{{{0.40000000000000002, 0},{1.3, 0},{25, 10},{-1494811886.836025, -341471909.85712731}}},{{{0.25, 0.29999999999999999},{1.5, 0},{-8, -28},{0.11624540039556594, -0.6426615040908118}}},{{{2, 0},{3.5, 0},{60, 0},{7.9620126403893301e+23, 0}}},{{{0.29999999999999999, 0},{1.6000000000000001, 0},{-60, 0},{0.29105788900377405, 0}}}};
const std::vector<std::array<cplx,4>> kTricomi = {{{{0.29999999999999999, 0},{1.2, 0},{2.5, 0},{0.75224673810391562, 0}}},{{{0.29999999999999999, 0.20000000000000001},{1.7, -0.10000000000000001},{-12, 3},{0.16062554370024823, -0.81128526037134152}}},{{{-0.20000000000000001, 0.10000000000000001},{0.59999999999999998, 0},{0, 17},{2.0614636210948825, 0.057571202856717817}}},{{{0.14999999999999999, -0.050000000000000003},{0.69999999999999996, 0.10000000000000001},{35, -20},{0.56817583059223253, 0.15293903935047404}}},{{{1.1000000000000001, 0},{2.2999999999999998, 0},{-5, -2},{-0.14987122459833216, 0.012076652559463049}}},{{{0.40000000000000002, 0},{1.3, 0},{15, 10},{0.30537410120467967, -0.07280643897063617}}},{{{0.25, 0.29999999999999999},{2, 0},{3, 1},{0.82740321643174164, -0.36428155564721548}}},{{{0.69999999999999996, 0},{1, 0},{-2, -0.5},{-0.15462596805549178, 0.71749639467105186}}},{{{0.29999999999999999, 0},{2, 0},{0.20000000000000001, 0.10000000000000001},{2.4946360661606635, -0.7688330441651674}}},{{{0.5, -0.20000000000000001},{1, 0},{8, 2},{0.30850780674243056, 0.10418065723681458}}},{{{0.20000000000000001, 0},{0.5, 0},{0.001, 0.002},{1.3349572782283068, -0.018141057356857993}}}};
const std::vector<std::array<cplx,5>> kGauss = {{{{0.29999999999999999, 0},{0.69999999999999996, 0},{1.3999999999999999, 0},{0.5, 0},{1.1004851329706322, 0}}},{{{0.29999999999999999, 0.10000000000000001},{-0.40000000000000002, 0},{1.2, 0},{-0.90000000000000002, 0.20000000000000001},{1.0846099873146591, 0.0099982205318425495}}},{{{0.29999999999999999, 0},{0.80000000000000004, 0},{1.5, 0},{-3, 0},{0.77464849153737547, 0}}},{{{0.25, 0.10000000000000001},{0.59999999999999998, 0},{1.3, 0},{2, 0.5},{0.91748831245907092, 0.32903699930342556}}},{{{1.2, 0},{0.45000000000000001, 0},{2.1000000000000001, 0},{0.29999999999999999, -4},{0.61672805246619922, -0.31444699098379292}}}};
const std::vector<std::array<cplx,8>> kAppell = {{{{0.5, 0},{0.29999999999999999, 0},{0.69999999999999996, 0},{1.2, 0},{1.5, 0},{0.29999999999999999, 0},{0.40000000000000002, 0},{1.1854976097478205, 0}}},{{{0.20000000000000001, 0.10000000000000001},{0.40000000000000002, 0},{-0.29999999999999999, 0},{1.1000000000000001, 0},{0.90000000000000002, 0},{-0.20000000000000001, 0.10000000000000001},{0, 0.5},{1.0018191931045777, -0.028235237017035973}}}};
}  // namespace fhdet::ref
